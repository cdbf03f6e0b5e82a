#include "circlepat/geometry.hpp"

#include <array>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "circlepat/error.hpp"
#include "circlepat/sphertrig.hpp"
#include "parallel.hpp"

namespace circlepat
{
namespace
{

using nlohmann::json;
using nlohmann::ordered_json;

// 1 - cos r without cancellation for small r
double versine(double r)
{
    const double s = std::sin(0.5 * r);
    return 2.0 * s * s;
}

ordered_json label_json(const Label& l)
{
    return l.is_number() ? ordered_json(l.number()) : ordered_json(l.text());
}

Label label_from(const json& j)
{
    if (j.is_number_unsigned() || j.is_number_integer()) {
        return Label{j.get<std::uint64_t>()};
    }
    return Label{j.get<std::string>()};
}

// Radial side slot: 0 plus_v0, 1 plus_v1, 2 minus_v0, 3 minus_v1.
std::size_t slot(Side s, std::size_t corner)
{
    return (s.orientation == Orientation::Plus ? 0 : 2) + corner;
}

const std::array<const char*, 4> kSideNames{"plus_v0", "plus_v1", "minus_v0", "minus_v1"};

}  // namespace

PatternMetric reconstruct(const WeightedCellGraph& g, const std::vector<double>& K, unsigned threads)
{
    if (K.size() != g.num_faces()) {
        throw ValidationError("expected " + std::to_string(g.num_faces()) + " coordinates, got " +
                              std::to_string(K.size()));
    }
    PatternMetric m;
    m.K = K;
    m.radii.resize(K.size());
    for (std::size_t f = 0; f < K.size(); ++f) {
        if (!std::isfinite(K[f])) {
            throw DomainError("coordinates must be finite");
        }
        m.radii[f] = std::atan(std::exp(-K[f]));
    }

    m.quads.resize(g.num_edges());
    detail::parallel_chunks(g.num_edges(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t e = begin; e < end; ++e) {
            Quadrilateral& q = m.quads[e];
            q.edge = e;
            q.face_plus = g.face_of({e, Orientation::Plus});
            q.face_minus = g.face_of({e, Orientation::Minus});
            const BigonShape b = bigon_from_K(g.edge(e).theta, K[q.face_plus], K[q.face_minus]);
            q.theta = b.theta;
            q.r_plus = b.r1;
            q.r_minus = b.r2;
            q.r3 = b.r3;
            q.half_angle_plus = b.alpha_half1;
            q.half_angle_minus = b.alpha_half2;
            q.ell_plus = b.ell1;
            q.ell_minus = b.ell2;
            q.T_plus = b.T1;
            q.T_minus = b.T2;
            q.bigon_area = b.area;
        }
    });

    const std::size_t F = g.num_faces();
    m.face_totals.assign(F, 0.0);
    m.center_cone_angles.assign(F, 0.0);
    m.face_areas.assign(F, 0.0);
    for (const Quadrilateral& q : m.quads) {
        const double a_plus = 2.0 * q.half_angle_plus;
        const double a_minus = 2.0 * q.half_angle_minus;
        m.face_totals[q.face_plus] += q.T_plus;
        m.face_totals[q.face_minus] += q.T_minus;
        m.center_cone_angles[q.face_plus] += a_plus;
        m.center_cone_angles[q.face_minus] += a_minus;
        m.face_areas[q.face_plus] += a_plus * versine(q.r_plus);
        m.face_areas[q.face_minus] += a_minus * versine(q.r_minus);
        m.bigon_area_sum += q.bigon_area;
    }
    for (double a : m.face_areas) {
        m.disk_area_sum += a;
    }
    m.total_area = m.disk_area_sum - m.bigon_area_sum;
    m.vertex_cone_angles = vertex_cone_angles(g);
    m.euler_characteristic = g.euler_characteristic();
    return m;
}

AuditResiduals audit(const PatternMetric& m, const WeightedCellGraph& g)
{
    if (m.quads.size() != g.num_edges() || m.face_totals.size() != g.num_faces()) {
        throw ValidationError("metric does not belong to this graph");
    }
    AuditResiduals r;
    for (const Quadrilateral& q : m.quads) {
        const double sectors = 2.0 * q.half_angle_plus * versine(q.r_plus) +
                               2.0 * q.half_angle_minus * versine(q.r_minus);
        const double quad = 2.0 * (q.half_angle_plus + q.half_angle_minus - q.theta);
        const double res = std::abs((sectors - quad) - (2.0 * q.theta - q.T_plus - q.T_minus));
        if (res > r.per_bigon || !std::isfinite(res)) {
            r.per_bigon = res;
            r.worst_edge = q.edge;
        }
    }
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        const double res = std::abs(m.face_totals[f] - (m.center_cone_angles[f] - m.face_areas[f]));
        if (res > r.per_face || !std::isfinite(res)) {
            r.per_face = res;
            r.worst_face = f;
        }
    }
    double deficit = 0.0;
    for (double a : m.vertex_cone_angles) {
        deficit += 2.0 * kPi - a;
    }
    for (double a : m.center_cone_angles) {
        deficit += 2.0 * kPi - a;
    }
    r.global_lhs = m.total_area;
    r.global_rhs = 2.0 * kPi * static_cast<double>(m.euler_characteristic) - deficit;
    r.global = std::abs(r.global_lhs - r.global_rhs);
    return r;
}

std::string export_net(const PatternMetric& m, const WeightedCellGraph& g)
{
    if (m.quads.size() != g.num_edges()) {
        throw ValidationError("metric does not belong to this graph");
    }
    // glue[e][slot] = (other edge, other slot)
    std::vector<std::array<std::pair<std::size_t, std::size_t>, 4>> glue(g.num_edges());
    for (const Face& face : g.faces()) {
        const auto& sides = face.boundary;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            const Side a = sides[i];
            const Side b = sides[(i + 1) % sides.size()];
            const std::size_t end_a = slot(a, g.runs_forward(a) ? 1 : 0);
            const std::size_t start_b = slot(b, g.runs_forward(b) ? 0 : 1);
            glue[a.edge][end_a] = {b.edge, start_b};
            glue[b.edge][start_b] = {a.edge, end_a};
        }
    }

    ordered_json doc;
    doc["chi"] = m.euler_characteristic;
    ordered_json quads = ordered_json::array();
    for (const Quadrilateral& q : m.quads) {
        ordered_json item;
        item["edge_id"] = label_json(g.edge(q.edge).id);
        item["face_plus"] = label_json(g.face(q.face_plus).id);
        item["face_minus"] = label_json(g.face(q.face_minus).id);
        item["theta"] = q.theta;
        item["r_plus"] = q.r_plus;
        item["r_minus"] = q.r_minus;
        item["r3"] = q.r3;
        item["half_angle_plus"] = q.half_angle_plus;
        item["half_angle_minus"] = q.half_angle_minus;
        // sides in cyclic order o+ v0 o- v1
        item["side_lengths"] = {q.r_plus, q.r_minus, q.r_minus, q.r_plus};
        item["corner_angles"] = {2.0 * q.half_angle_plus, kPi - q.theta, 2.0 * q.half_angle_minus,
                                 kPi - q.theta};
        ordered_json gl = ordered_json::array();
        for (std::size_t s = 0; s < 4; ++s) {
            const auto [other, other_slot] = glue[q.edge][s];
            ordered_json entry;
            entry["side"] = kSideNames[s];
            entry["edge"] = label_json(g.edge(other).id);
            entry["other_side"] = kSideNames[other_slot];
            gl.push_back(std::move(entry));
        }
        item["glue"] = std::move(gl);
        quads.push_back(std::move(item));
    }
    doc["quadrilaterals"] = std::move(quads);

    ordered_json faces = ordered_json::array();
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        ordered_json item;
        item["id"] = label_json(g.face(f).id);
        item["K"] = m.K[f];
        item["radius"] = m.radii[f];
        item["cone_angle"] = m.center_cone_angles[f];
        item["area"] = m.face_areas[f];
        faces.push_back(std::move(item));
    }
    doc["faces"] = std::move(faces);
    doc["vertex_cone_angles"] = m.vertex_cone_angles;
    return doc.dump(2);
}

Net read_net(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("net document is not valid JSON: ") + e.what());
    }
    Net net;
    try {
        for (const json& item : doc.at("quadrilaterals")) {
            NetQuad q;
            q.edge_id = label_from(item.at("edge_id"));
            q.face_plus = label_from(item.at("face_plus"));
            q.face_minus = label_from(item.at("face_minus"));
            q.theta = item.at("theta").get<double>();
            q.r_plus = item.at("r_plus").get<double>();
            q.r_minus = item.at("r_minus").get<double>();
            q.r3 = item.at("r3").get<double>();
            q.half_angle_plus = item.at("half_angle_plus").get<double>();
            q.half_angle_minus = item.at("half_angle_minus").get<double>();
            for (const json& gl : item.at("glue")) {
                q.glue.push_back(NetGlue{gl.at("side").get<std::string>(), label_from(gl.at("edge")),
                                         gl.at("other_side").get<std::string>()});
            }
            net.quads.push_back(std::move(q));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed net document: ") + e.what());
    }
    return net;
}

std::vector<std::pair<Label, double>> net_center_angles(const Net& net)
{
    std::vector<std::pair<Label, double>> out;
    auto add = [&out](const Label& face, double angle) {
        for (auto& [label, sum] : out) {
            if (label == face) {
                sum += angle;
                return;
            }
        }
        out.emplace_back(face, angle);
    };
    for (const NetQuad& q : net.quads) {
        add(q.face_plus, 2.0 * q.half_angle_plus);
        add(q.face_minus, 2.0 * q.half_angle_minus);
    }
    return out;
}

}  // namespace circlepat
