#pragma once

#include <span>
#include <string>
#include <vector>

#include "dgoursat/frames.hpp"
#include "dgoursat/goursat.hpp"
#include "dgoursat/sinegordon.hpp"

namespace dgoursat {

struct SurfaceProvenance {
    Scheme scheme = Scheme::Hirota;
    std::string data_id;
    std::vector<BacklundParam> bt_chain;  // transformations applied to reach this mesh
};

/// Discrete surface F on the (n+1) x (n+1) lattice sites.
struct SurfaceMesh {
    LatticeDomain2 domain;
    double lambda = 1.0;
    Grid2<Su2Vector> points;
    SurfaceProvenance provenance;

    double eps() const { return domain.eps(); }
};

/// Sym points of an already propagated frame.
SurfaceMesh mesh_from_frame(const FrameField& frame, SurfaceProvenance prov = {});

/// Sym points of the frame of `fields` at lambda, streamed row by row.
/// Same values as mesh_from_frame(propagate_frame(fields, lambda)).
SurfaceMesh surface_from_fields(const EdgeField2& fields, double lambda, SurfaceProvenance prov = {});

/// Sym points only at sites (stride*i, stride*j); n must be divisible by stride.
/// With thetas/alphas given, the frame at each site is first multiplied by
/// W(thetas[0]; alphas[0]), then W(thetas[1]; alphas[1]), and so on.
Grid2<Su2Vector> strided_surface_points(const EdgeField2& fields, double lambda, int stride,
                                        std::span<const GridField> thetas = {}, std::span<const double> alphas = {});

/// Hirota solve, frame, Sym formula. The naive scheme throws ValidationError: its
/// solutions carry no zero-curvature representation and hence no surface.
SurfaceMesh build_surface(const GoursatData2& data, const LatticeDomain2& dom, double lambda,
                          Scheme scheme = Scheme::Hirota);

/// Expected edge lengths of the mesh at spectral parameter lambda:
/// x-edges eps lambda / (1 + eps^2 lambda^2/4), y-edges eps lambda^-1 / (1 + eps^2 lambda^-2/4).
/// Both equal eps (1 + eps^2/4)^-1 at lambda = 1.
double expected_edge_x(double eps, double lambda);
double expected_edge_y(double eps, double lambda);

struct KSurfaceReport {
    double edge = 0.0;       // max | |edge| - expected | / expected
    double planarity = 0.0;  // max scaled tetrahedron volume at interior vertices
    double angle = 0.0;      // max |cos(measured) - cos(from phi)|
    double angle_sum = 0.0;  // max |sum of the four vertex angles - 2 pi|
    int interior_sites = 0;
    /// Vertices where two adjacent edges are (anti)parallel; planarity is vacuous there.
    int degenerate_sites = 0;

    double max_residual() const;
};

/// Edge lengths, planarity of vertex stars and the four vertex angles against phi.
KSurfaceReport validate_k_surface(const SurfaceMesh& mesh, const PhiField& phi);

struct DisplacementStats {
    double mean = 0.0;
    double stddev = 0.0;
    double rel_stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

DisplacementStats displacement_stats(const SurfaceMesh& from, const SurfaceMesh& to);

struct BacklundSurfaceResult {
    std::vector<SurfaceMesh> layers;            // 0..R, W-route surfaces
    std::vector<double> route_residual;         // per layer >= 1, sup distance of the two constructions
    std::vector<DisplacementStats> displacement;  // per transition z -> z+1
    LayeredField3 fields;
};

/// Surfaces of all layers. Layer z's frame is W_z ... W_1 Psi_0. The result is also rebuilt from the
/// layer's own fields (frame starting at 1) and compared after undoing the rigid motion given by the
/// W-route frame at the origin; the largest distance is in route_residual.
BacklundSurfaceResult backlund_surface(const GoursatData2& data, const LatticeDomain2& dom,
                                       const std::vector<BacklundParam>& chain, double lambda);

/// One Hirota surface per lambda, all from the same fields.
std::vector<SurfaceMesh> associated_family(const GoursatData2& data, const LatticeDomain2& dom,
                                           const std::vector<double>& lambdas);

/// sup over sites of |p - q|; throws if the shapes differ.
double sup_distance(const Grid2<Su2Vector>& p, const Grid2<Su2Vector>& q);

/// Wavefront OBJ: `v x y z` per site (index j*(n+1)+i), then one quad `f` per cell.
void export_obj(const SurfaceMesh& mesh, const std::string& path);
/// Reads the `v` lines of an OBJ file written by export_obj.
std::vector<Su2Vector> read_obj_vertices(const std::string& path);
/// Sidecar with eps=, lambda=, r=, scheme=, bt_chain= lines.
void write_meta(const SurfaceMesh& mesh, const std::string& path);

}  // namespace dgoursat
