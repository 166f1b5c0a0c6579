#include "dgoursat/ndsys.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "dgoursat/format.hpp"

namespace dgoursat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string field_name(const SystemSpecND& spec, int k) {
    if (k < static_cast<int>(spec.names.size()) && !spec.names[k].empty()) return spec.names[k];
    return "a" + std::to_string(k + 1);
}

std::string site_string(std::span<const int> x) {
    std::string s = "(";
    for (std::size_t m = 0; m < x.size(); ++m) s += (m ? "," : "") + std::to_string(x[m]);
    return s + ")";
}

}  // namespace

bool SystemSpecND::evolves(int k, int i) const {
    return std::find(E[k].begin(), E[k].end(), i) != E[k].end();
}

std::vector<int> SystemSpecND::D(int k) const {
    std::vector<int> out;
    for (int i = 0; i < d; ++i)
        if (!evolves(k, i)) out.push_back(i);
    return out;
}

const EquationND& SystemSpecND::equation(int k, int i) const {
    for (const auto& eq : equations)
        if (eq.field == k && eq.dir == i) return eq;
    throw ValidationError("no equation for field " + field_name(*this, k) + " in direction " + std::to_string(i));
}

void SystemSpecND::validate() const {
    if (N < 1 || d < 1) throw ValidationError("system needs at least one field and one direction");
    if (static_cast<int>(E.size()) != N) throw ValidationError("E must list one direction set per field");
    if (static_cast<int>(eps.size()) != d) throw ValidationError("eps must have one step per direction");
    for (double e : eps)
        if (!(e > 0.0) || !std::isfinite(e)) throw ValidationError("steps must be positive, got " + fmt17(e));
    for (int k = 0; k < N; ++k) {
        if (E[k].empty()) throw ValidationError("E_k is empty for field " + field_name(*this, k));
        for (std::size_t m = 0; m < E[k].size(); ++m) {
            const int i = E[k][m];
            if (i < 0 || i >= d) throw ValidationError("direction " + std::to_string(i) + " out of range");
            if (m > 0 && E[k][m - 1] >= i) throw ValidationError("E_k must be sorted without repeats");
            int count = 0;
            for (const auto& eq : equations)
                if (eq.field == k && eq.dir == i) ++count;
            if (count != 1)
                throw ValidationError("field " + field_name(*this, k) + " needs exactly one equation in direction " +
                                      std::to_string(i));
        }
    }
    for (const auto& eq : equations) {
        if (eq.field < 0 || eq.field >= N || !evolves(eq.field, eq.dir))
            throw ValidationError("equation for a pair (k, i) with i outside E_k");
        if (!eq.f) throw ValidationError("equation without a function");
        for (int l : eq.deps)
            if (l < 0 || l >= N) throw ValidationError("dependency index out of range");
    }
}

std::vector<DependencyViolation> dependency_violations(const SystemSpecND& spec) {
    std::vector<DependencyViolation> out;
    for (const auto& eq : spec.equations) {
        for (int l : eq.deps) {
            for (int j : spec.E[eq.field]) {
                if (j != eq.dir && !spec.evolves(l, j)) {
                    out.push_back({eq.field, eq.dir, l});
                    break;
                }
            }
        }
    }
    return out;
}

bool check_dependency(const SystemSpecND& spec) { return dependency_violations(spec).empty(); }

double check_identity(const SystemSpecND& spec, std::span<const std::vector<double>> samples) {
    spec.validate();
    const int N = spec.N;
    auto shifted = [&](const std::vector<double>& a, int i) {
        // a + eps_i f_i(a), undefined components NaN
        std::vector<double> out(N, kNaN);
        for (int l = 0; l < N; ++l)
            if (spec.evolves(l, i)) out[l] = a[l] + spec.eps[i] * spec.equation(l, i).f(a);
        return out;
    };
    double worst = 0.0;
    for (const auto& a : samples) {
        if (static_cast<int>(a.size()) != N) throw ValidationError("check_identity: sample has the wrong length");
        for (int k = 0; k < N; ++k) {
            const auto& Ek = spec.E[k];
            for (std::size_t p = 0; p < Ek.size(); ++p) {
                for (std::size_t q = p + 1; q < Ek.size(); ++q) {
                    const int i = Ek[p], j = Ek[q];
                    const auto& fi = spec.equation(k, i).f;
                    const auto& fj = spec.equation(k, j).f;
                    const double lhs = spec.eps[i] * fi(a) + spec.eps[j] * fj(shifted(a, i));
                    const double rhs = spec.eps[j] * fj(a) + spec.eps[i] * fi(shifted(a, j));
                    const double r = std::abs(lhs - rhs);
                    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
                    worst = std::max(worst, r);
                }
            }
        }
    }
    return worst;
}

bool FieldND::contains(std::span<const int> x) const {
    for (std::size_t m = 0; m < shape.size(); ++m)
        if (x[m] < 0 || x[m] >= shape[m]) return false;
    return true;
}

std::size_t FieldND::index(std::span<const int> x) const {
    std::size_t idx = 0;
    for (std::size_t m = 0; m < shape.size(); ++m) idx += static_cast<std::size_t>(x[m]) * strides[m];
    return idx;
}

namespace {

class NdSolver {
public:
    NdSolver(const SystemSpecND& spec, const std::vector<DataFnND>& data, const std::vector<double>& r,
             const SolveOptionsND& opts)
        : spec_(spec), data_(data), opts_(opts) {
        spec.validate();
        if (!check_dependency(spec)) {
            const auto v = dependency_violations(spec).front();
            throw ValidationError("dependency check failed: f_(" + field_name(spec, v.field) + "," +
                                  std::to_string(v.dir) + ") reads " + field_name(spec, v.reads));
        }
        if (static_cast<int>(data.size()) != spec.N) throw ValidationError("need one data function per field");
        if (static_cast<int>(r.size()) != spec.d) throw ValidationError("need one extent per direction");
        st_.eps = spec.eps;
        st_.n.resize(spec.d);
        box_.resize(spec.d);
        total_ = 1;
        for (int i = 0; i < spec.d; ++i) {
            const double q = r[i] / spec.eps[i];
            const double m = std::round(q);
            if (!(r[i] >= 0.0) || std::abs(q - m) > 1e-9 * std::max(1.0, q))
                throw ValidationError("extent r=" + fmt17(r[i]) + " is not a multiple of eps=" + fmt17(spec.eps[i]));
            st_.n[i] = static_cast<int>(m);
            box_[i] = st_.n[i] + 1;
            total_ *= static_cast<std::size_t>(box_[i]);
        }
        for (int k = 0; k < spec.N; ++k) {
            FieldND f;
            f.shape.resize(spec.d);
            f.strides.resize(spec.d);
            std::size_t stride = 1;
            for (int i = 0; i < spec.d; ++i) {
                f.shape[i] = spec.evolves(k, i) ? st_.n[i] + 1 : st_.n[i];
                f.strides[i] = stride;
                stride *= static_cast<std::size_t>(f.shape[i]);
            }
            f.values.assign(stride, kNaN);
            st_.fields.push_back(std::move(f));
        }
        box_strides_.resize(spec.d);
        std::size_t s = 1;
        for (int i = 0; i < spec.d; ++i) {
            box_strides_[i] = s;
            s *= static_cast<std::size_t>(box_[i]);
        }
        verify_every_ = total_ <= opts.full_verify_limit ? 1 : 100;
    }

    StateND run() {
        if (total_ == 0) return std::move(st_);
        switch (opts_.order) {
            case SweepOrder::Lexicographic: sweep_lex(false); break;
            case SweepOrder::Reverse: sweep_lex(true); break;
            case SweepOrder::Hyperplane: sweep_hyperplanes(); break;
        }
        return std::move(st_);
    }

private:
    struct Local {
        double mismatch = 0.0;
        std::size_t verified = 0;
    };

    void decode(std::size_t lin, std::vector<int>& x) const {
        for (int i = 0; i < spec_.d; ++i) {
            x[i] = static_cast<int>(lin % static_cast<std::size_t>(box_[i]));
            lin /= static_cast<std::size_t>(box_[i]);
        }
    }

    std::size_t encode(const std::vector<int>& x) const {
        std::size_t lin = 0;
        for (int i = 0; i < spec_.d; ++i) lin += static_cast<std::size_t>(x[i]) * box_strides_[i];
        return lin;
    }

    void gather(const std::vector<int>& y, std::vector<double>& state) const {
        for (int l = 0; l < spec_.N; ++l) {
            const FieldND& f = st_.fields[l];
            state[l] = f.contains(y) ? f.at(y) : kNaN;
        }
    }

    // a_k(x - e_i) + eps_i f_(k,i)(state at x - e_i)
    double via(int k, int i, const std::vector<int>& x, std::vector<int>& y, std::vector<double>& state) const {
        y = x;
        --y[i];
        gather(y, state);
        return st_.fields[k].at(y) + spec_.eps[i] * spec_.equation(k, i).f(state);
    }

    void process(const std::vector<int>& x, Local& loc, std::vector<int>& y, std::vector<double>& state) {
        const bool verify = encode(x) % verify_every_ == 0;
        bool counted = false;
        for (int k = 0; k < spec_.N; ++k) {
            FieldND& f = st_.fields[k];
            if (!f.contains(x)) continue;
            int chosen = -1;
            for (int i : spec_.E[k]) {
                if (x[i] == 0) continue;
                if (chosen < 0 || opts_.route == RouteRule::Largest) chosen = i;
            }
            double value;
            if (chosen < 0) {
                std::vector<double> coords(spec_.d);
                for (int i = 0; i < spec_.d; ++i) coords[i] = x[i] * spec_.eps[i];
                value = data_[k](coords);
            } else {
                value = via(k, chosen, x, y, state);
            }
            if (!std::isfinite(value))
                throw NumericalError("solve_goursat_nd: non-finite " + field_name(spec_, k) + " at site " +
                                     site_string(x));
            f.values[f.index(x)] = value;
            if (!verify || chosen < 0) continue;
            for (int i : spec_.E[k]) {
                if (i == chosen || x[i] == 0) continue;
                const double alt = via(k, i, x, y, state);
                const double mis = std::abs(alt - value);
                if (!(mis <= opts_.mismatch_tol * std::max(1.0, std::abs(value))))
                    throw NumericalError("solve_goursat_nd: field " + field_name(spec_, k) + " at site " +
                                         site_string(x) + " differs by " + fmt17(mis) + " between directions " +
                                         std::to_string(chosen) + " and " + std::to_string(i) +
                                         " (incompatible system)");
                loc.mismatch = std::max(loc.mismatch, mis);
                counted = true;
            }
        }
        if (counted) ++loc.verified;
    }

    void merge(const Local& loc) {
        st_.route_mismatch = std::max(st_.route_mismatch, loc.mismatch);
        st_.verified_sites += loc.verified;
    }

    void sweep_lex(bool reverse) {
        const int d = spec_.d;
        std::vector<int> x(d, 0), y(d);
        std::vector<double> state(spec_.N);
        Local loc;
        for (std::size_t c = 0; c < total_; ++c) {
            process(x, loc, y, state);
            // odometer: direction 0 fastest, or the last one when reversed
            for (int m = 0; m < d; ++m) {
                const int i = reverse ? d - 1 - m : m;
                if (++x[i] < box_[i]) break;
                x[i] = 0;
            }
        }
        merge(loc);
    }

    void sweep_hyperplanes() {
        int max_sum = 0;
        for (int b : box_) max_sum += b - 1;
        std::vector<std::vector<std::size_t>> planes(static_cast<std::size_t>(max_sum) + 1);
        {
            std::vector<int> x(spec_.d);
            for (std::size_t lin = 0; lin < total_; ++lin) {
                decode(lin, x);
                planes[std::accumulate(x.begin(), x.end(), 0)].push_back(lin);
            }
        }
        const int threads = std::max(1, opts_.threads);
        for (const auto& plane : planes) {
            if (threads == 1 || plane.size() < 64) {
                run_chunk(plane, 0, plane.size());
                continue;
            }
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(threads);
            std::vector<Local> locals(threads);
            const std::size_t chunk = (plane.size() + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                const std::size_t lo = std::min(plane.size(), t * chunk), hi = std::min(plane.size(), lo + chunk);
                pool.emplace_back([&, t, lo, hi] {
                    try {
                        locals[t] = chunk_sites(plane, lo, hi);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
            for (const auto& l : locals) merge(l);
        }
    }

    Local chunk_sites(const std::vector<std::size_t>& plane, std::size_t lo, std::size_t hi) {
        std::vector<int> x(spec_.d), y(spec_.d);
        std::vector<double> state(spec_.N);
        Local loc;
        for (std::size_t p = lo; p < hi; ++p) {
            decode(plane[p], x);
            process(x, loc, y, state);
        }
        return loc;
    }

    void run_chunk(const std::vector<std::size_t>& plane, std::size_t lo, std::size_t hi) {
        merge(chunk_sites(plane, lo, hi));
    }

    const SystemSpecND& spec_;
    const std::vector<DataFnND>& data_;
    SolveOptionsND opts_;
    StateND st_;
    std::vector<int> box_;
    std::vector<std::size_t> box_strides_;
    std::size_t total_ = 0;
    std::size_t verify_every_ = 1;
};

}  // namespace

StateND solve_goursat_nd(const SystemSpecND& spec, const std::vector<DataFnND>& data, const std::vector<double>& r,
                         const SolveOptionsND& opts) {
    return NdSolver(spec, data, r, opts).run();
}

SystemSpecND hirota_system_2d(double eps) {
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    SystemSpecND s;
    s.N = 2;
    s.d = 2;
    s.E = {{1}, {0}};
    s.eps = {eps, eps};
    s.names = {"a", "b"};
    s.equations = {
        {0, 1, [f = rhs.f, eps](std::span<const double> v) { return f(v[0], v[1], eps); }, {0, 1}},
        {1, 0, [g = rhs.g, eps](std::span<const double> v) { return g(v[0], v[1], eps); }, {0, 1}},
    };
    return s;
}

SystemSpecND sine_gordon_bt_system(double eps, double alpha) {
    const Rhs2 rhs = make_rhs(Scheme::Hirota);
    const BacklundRhs bt = discrete_backlund_rhs(alpha);
    SystemSpecND s;
    s.N = 3;
    s.d = 3;
    s.E = {{1, 2}, {0, 2}, {0, 1}};
    s.eps = {eps, eps, 1.0};
    s.names = {"a", "b", "theta"};
    s.equations = {
        {0, 1, [f = rhs.f, eps](std::span<const double> v) { return f(v[0], v[1], eps); }, {0, 1}},
        {0, 2, [xi = bt.xi, eps](std::span<const double> v) { return xi(v[0], v[2], eps); }, {0, 2}},
        {1, 0, [g = rhs.g, eps](std::span<const double> v) { return g(v[0], v[1], eps); }, {0, 1}},
        {1, 2, [eta = bt.eta, eps](std::span<const double> v) { return eta(v[1], v[2], eps); }, {1, 2}},
        {2, 0, [u = bt.u, eps](std::span<const double> v) { return u(v[0], v[2], eps); }, {0, 2}},
        {2, 1, [vv = bt.v, eps](std::span<const double> v) { return vv(v[1], v[2], eps); }, {1, 2}},
    };
    return s;
}

std::vector<DataFnND> sine_gordon_bt_data(const GoursatData2& data, std::vector<double> theta0) {
    std::vector<DataFnND> out = {
        [data](std::span<const double> c) { return data.a0(c[0]); },
        [data](std::span<const double> c) { return data.b0(c[1]); },
    };
    if (!theta0.empty()) {
        out.push_back([theta0 = std::move(theta0)](std::span<const double> c) {
            const auto z = static_cast<std::size_t>(std::lround(c[2]));
            if (z >= theta0.size()) throw ValidationError("no theta0 for layer " + std::to_string(z));
            return theta0[z];
        });
    }
    return out;
}

EdgeField2 edge_field_from_state(const StateND& st, const LatticeDomain2& dom, int z) {
    const int n = dom.n();
    const int d = static_cast<int>(st.n.size());
    if (d < 2 || st.fields.size() < 2 || st.n[0] != n || st.n[1] != n)
        throw ValidationError("edge_field_from_state: state does not match the domain");
    if (d > 2 && (z < 0 || z > st.n[2])) throw ValidationError("edge_field_from_state: layer out of range");
    EdgeField2 out(dom);
    std::vector<int> x(d, 0);
    if (d > 2) x[2] = z;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            x[0] = i;
            x[1] = j;
            out.a(i, j) = st.fields[0].at(x);
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            x[0] = i;
            x[1] = j;
            out.b(i, j) = st.fields[1].at(x);
        }
    return out;
}

std::vector<std::string> write_state_csv(const StateND& st, const SystemSpecND& spec, const std::string& prefix) {
    std::vector<std::string> paths;
    const int d = static_cast<int>(st.n.size());
    for (std::size_t k = 0; k < st.fields.size(); ++k) {
        const std::string name = field_name(spec, static_cast<int>(k));
        const std::string path = prefix + "_" + name + ".csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << "# field=" << name << " eps=";
        for (int i = 0; i < d; ++i) out << (i ? ";" : "") << fmt17(st.eps[i]);
        out << " n=";
        for (int i = 0; i < d; ++i) out << (i ? ";" : "") << st.n[i];
        out << '\n';
        for (int i = 0; i < d; ++i) out << 'i' << i + 1 << ',';
        out << "value\n";
        const FieldND& f = st.fields[k];
        std::vector<int> x(d, 0);
        for (std::size_t lin = 0; lin < f.values.size(); ++lin) {
            std::size_t rem = lin;
            for (int i = 0; i < d; ++i) {
                x[i] = static_cast<int>(rem % static_cast<std::size_t>(f.shape[i]));
                rem /= static_cast<std::size_t>(f.shape[i]);
                out << x[i] << ',';
            }
            out << fmt17(f.values[lin]) << '\n';
        }
        if (!out) throw IoError("write failed: " + path);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace dgoursat
