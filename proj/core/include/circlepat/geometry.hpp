#pragma once

// Metric reconstruction from K coordinates, Gauss-Bonnet audits, and the
// quadrilateral net.
//
// Every edge e yields a geodesic quadrilateral with corners o+, v0, o-, v1:
// o+- are the centres of the disks of f(e+-), v0 and v1 the corners of the
// bigon at ends[0] and ends[1] of e. Its diagonal o+ o- splits it into two
// copies of the triangle (o+, v, o-); the halves on each side of the
// diagonal are the sectors of D_f(e+) and D_f(e-) spanned by the bigon.
// Gluing the quadrilaterals along their radial sides rebuilds the surface.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "circlepat/cellgraph.hpp"

namespace circlepat
{

struct Quadrilateral
{
    std::size_t edge = 0;
    std::size_t face_plus = 0;
    std::size_t face_minus = 0;
    double theta = 0.0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    double r3 = 0.0;
    double half_angle_plus = 0.0;   // angle at o+ of the triangle (o+, v, o-)
    double half_angle_minus = 0.0;
    double ell_plus = 0.0;          // arc lengths of the two bigon sides
    double ell_minus = 0.0;
    double T_plus = 0.0;            // sector totals
    double T_minus = 0.0;
    double bigon_area = 0.0;
};

struct PatternMetric
{
    std::vector<double> K;
    std::vector<double> radii;
    std::vector<Quadrilateral> quads;          // one per edge
    std::vector<double> face_totals;           // T(dD_f)
    std::vector<double> center_cone_angles;    // alpha_f
    std::vector<double> vertex_cone_angles;    // alpha_v
    std::vector<double> face_areas;            // sum of sector areas
    double disk_area_sum = 0.0;
    double bigon_area_sum = 0.0;
    /// Area of the surface: the disks cover it, overlapping exactly on the
    /// bigons, so this is disk_area_sum - bigon_area_sum.
    double total_area = 0.0;
    long euler_characteristic = 0;
};

PatternMetric reconstruct(const WeightedCellGraph& g, const std::vector<double>& K, unsigned threads = 1);

struct AuditResiduals
{
    /// max over edges of |A - (2 theta - T+ - T-)| with A recomputed as
    /// sector+ + sector- - quadrilateral.
    double per_bigon = 0.0;
    std::size_t worst_edge = 0;
    /// max over faces of |T(dD_f) - (alpha_f - Area(D_f))|.
    double per_face = 0.0;
    std::size_t worst_face = 0;
    /// |total_area - (2 pi chi - sum over cone points of (2 pi - alpha_p))|,
    /// cone points being all vertices and all face centres.
    double global = 0.0;
    double global_lhs = 0.0;
    double global_rhs = 0.0;
};

AuditResiduals audit(const PatternMetric& m, const WeightedCellGraph& g);

/// JSON net document: per-edge quadrilateral records with gluing
/// instructions, plus per-face and per-vertex summaries. The radial sides
/// of a quadrilateral are named plus_v0, plus_v1 (from o+ to v0, v1) and
/// minus_v0, minus_v1. Within each face, the sector of boundary side i is
/// glued to the sector of side i+1 along the radius to their common
/// corner; the face's cyclic order as given is the marking.
std::string export_net(const PatternMetric& m, const WeightedCellGraph& g);

struct NetGlue
{
    std::string side;        // plus_v0 | plus_v1 | minus_v0 | minus_v1
    Label edge;              // quadrilateral glued to
    std::string other_side;
};

struct NetQuad
{
    Label edge_id;
    Label face_plus;
    Label face_minus;
    double theta = 0.0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    double r3 = 0.0;
    double half_angle_plus = 0.0;
    double half_angle_minus = 0.0;
    std::vector<NetGlue> glue;
};

struct Net
{
    std::vector<NetQuad> quads;
};

/// Parses a document written by export_net. Throws ParseError.
Net read_net(std::string_view text);

/// Sum of full sector angles 2 * half_angle per face label, in order of
/// first appearance in the records.
std::vector<std::pair<Label, double>> net_center_angles(const Net& net);

}  // namespace circlepat
