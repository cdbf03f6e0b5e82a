#include "circlepat/cellgraph.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "circlepat/error.hpp"
#include "circlepat/sphertrig.hpp"

namespace circlepat
{
namespace
{

// Angles within this distance above pi/2 are taken to be pi/2 (decimal
// round-off in hand-written documents).
constexpr double kRightAngleSnap = 1e-12;

class DisjointSets
{
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

std::string side_name(const WeightedCellGraph& g, Side s)
{
    return "(" + g.edge(s.edge).id.str() + ", " + orientation_symbol(s.orientation) + ")";
}

[[noreturn]] void invalid(const std::string& what)
{
    throw ValidationError(what);
}

}  // namespace

std::string Label::str() const
{
    return is_number() ? std::to_string(number()) : text();
}

WeightedCellGraph::WeightedCellGraph(std::size_t num_vertices, std::vector<Edge> edges,
                                     std::vector<Face> faces, const ValidationOptions& options)
    : num_vertices_{num_vertices}, edges_{std::move(edges)}, faces_{std::move(faces)}
{
    validate(options);
}

void WeightedCellGraph::validate(const ValidationOptions& options)
{
    if (num_vertices_ == 0) {
        invalid("graph has no vertices");
    }
    if (edges_.empty()) {
        invalid("graph has no edges");
    }
    if (faces_.empty()) {
        invalid("graph has no faces");
    }

    std::unordered_set<std::string> seen;
    for (auto& e : edges_) {
        const std::string id = e.id.str();
        if (!seen.insert(id).second) {
            invalid("duplicate edge id " + id);
        }
        for (std::size_t v : e.ends) {
            if (v >= num_vertices_) {
                invalid("edge " + id + " has endpoint " + std::to_string(v) + " out of range");
            }
        }
        if (e.theta > kHalfPi && e.theta <= kHalfPi + kRightAngleSnap) {
            e.theta = kHalfPi;
        }
        if (!std::isfinite(e.theta) || e.theta <= 0.0 || e.theta > kHalfPi) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "edge " << id << " has theta " << e.theta << " outside (0, pi/2]";
            invalid(msg.str());
        }
    }
    seen.clear();
    for (const auto& f : faces_) {
        const std::string id = f.id.str();
        if (!seen.insert(id).second) {
            invalid("duplicate face id " + id);
        }
        if (f.boundary.empty()) {
            invalid("face " + id + " has an empty boundary");
        }
        for (const Side& s : f.boundary) {
            if (s.edge >= edges_.size()) {
                invalid("face " + id + " references unknown edge index " + std::to_string(s.edge));
            }
        }
    }

    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    side_face_.assign(2 * edges_.size(), kUnset);
    side_position_.assign(2 * edges_.size(), kUnset);
    side_forward_.assign(2 * edges_.size(), 0);

    for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
        const Face& f = faces_[fi];
        if (options.strict_sides) {
            std::unordered_set<std::size_t> local;
            for (const Side& s : f.boundary) {
                if (!local.insert(side_index(s)).second) {
                    invalid("face " + f.id.str() + " visits side " + side_name(*this, s) + " twice");
                }
            }
        }
        for (std::size_t p = 0; p < f.boundary.size(); ++p) {
            const std::size_t idx = side_index(f.boundary[p]);
            if (side_face_[idx] != kUnset) {
                invalid("side " + side_name(*this, f.boundary[p]) + " of edge appears more than once");
            }
            side_face_[idx] = fi;
            side_position_[idx] = p;
        }
    }
    for (std::size_t idx = 0; idx < side_face_.size(); ++idx) {
        if (side_face_[idx] == kUnset) {
            const Side s{idx / 2, idx % 2 == 0 ? Orientation::Plus : Orientation::Minus};
            invalid("side " + side_name(*this, s) + " is not on any face boundary");
        }
    }

    // Closed walk: choose a traversal direction for every side so that
    // consecutive sides meet at a vertex and the walk returns to its start.
    // Non-loop edges force the direction; loops follow the sign (+ runs
    // ends[0] -> ends[1]). The first side tries its sign direction first.
    for (const Face& f : faces_) {
        const std::size_t n = f.boundary.size();
        std::vector<char> forward(n, 0);
        bool closed = false;
        for (int attempt = 0; attempt < 2 && !closed; ++attempt) {
            const Side first = f.boundary[0];
            const bool first_forward = (first.orientation == Orientation::Plus) == (attempt == 0);
            if (attempt == 1 && edges_[first.edge].is_loop()) {
                break;
            }
            const auto& e0 = edges_[first.edge];
            const std::size_t start = first_forward ? e0.ends[0] : e0.ends[1];
            std::size_t current = first_forward ? e0.ends[1] : e0.ends[0];
            forward[0] = first_forward ? 1 : 0;
            bool ok = true;
            for (std::size_t p = 1; p < n && ok; ++p) {
                const Side s = f.boundary[p];
                const Edge& e = edges_[s.edge];
                if (e.is_loop()) {
                    ok = e.ends[0] == current;
                    forward[p] = s.orientation == Orientation::Plus ? 1 : 0;
                } else if (e.ends[0] == current) {
                    forward[p] = 1;
                    current = e.ends[1];
                } else if (e.ends[1] == current) {
                    forward[p] = 0;
                    current = e.ends[0];
                } else {
                    ok = false;
                }
            }
            closed = ok && current == start;
        }
        if (!closed) {
            invalid("face " + f.id.str() + " boundary is not a closed walk");
        }
        for (std::size_t p = 0; p < n; ++p) {
            side_forward_[side_index(f.boundary[p])] = forward[p];
        }
    }

    DisjointSets components(num_vertices_);
    for (const Edge& e : edges_) {
        components.unite(e.ends[0], e.ends[1]);
    }
    for (std::size_t v = 1; v < num_vertices_; ++v) {
        if (components.find(v) != components.find(0)) {
            invalid("graph is disconnected (vertex " + std::to_string(v) + " not reachable from vertex 0)");
        }
    }

    if (options.require_closed_surface) {
        // Link of a vertex: edge-ends at the vertex joined by face corners.
        // Edge-end (e, j) has index 2e + j.
        DisjointSets link(2 * edges_.size());
        for (const Face& f : faces_) {
            const std::size_t n = f.boundary.size();
            for (std::size_t p = 0; p < n; ++p) {
                const Side in = f.boundary[p];
                const Side out = f.boundary[(p + 1) % n];
                const std::size_t arrive = 2 * in.edge + (runs_forward(in) ? 1 : 0);
                const std::size_t depart = 2 * out.edge + (runs_forward(out) ? 0 : 1);
                link.unite(arrive, depart);
            }
        }
        std::vector<std::size_t> root(num_vertices_, kUnset);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            for (std::size_t j = 0; j < 2; ++j) {
                const std::size_t v = edges_[e].ends[j];
                const std::size_t r = link.find(2 * e + j);
                if (root[v] == kUnset) {
                    root[v] = r;
                } else if (root[v] != r) {
                    invalid("vertex " + std::to_string(v) + " has a disconnected link; not a closed surface");
                }
            }
        }
    }
}

std::size_t WeightedCellGraph::start_vertex(Side s) const
{
    const Edge& e = edges_.at(s.edge);
    return runs_forward(s) ? e.ends[0] : e.ends[1];
}

std::size_t WeightedCellGraph::end_vertex(Side s) const
{
    const Edge& e = edges_.at(s.edge);
    return runs_forward(s) ? e.ends[1] : e.ends[0];
}

long WeightedCellGraph::euler_characteristic() const noexcept
{
    return static_cast<long>(num_vertices_) - static_cast<long>(edges_.size())
           + static_cast<long>(faces_.size());
}

std::optional<std::size_t> WeightedCellGraph::find_face(std::string_view label) const
{
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        if (faces_[f].id.str() == label) {
            return f;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> WeightedCellGraph::find_edge(std::string_view label) const
{
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].id.str() == label) {
            return e;
        }
    }
    return std::nullopt;
}

std::vector<OrientedEdge> oriented_edges(const WeightedCellGraph& g)
{
    std::vector<OrientedEdge> out;
    out.reserve(2 * g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        for (Orientation o : {Orientation::Plus, Orientation::Minus}) {
            const Side s{e, o};
            out.push_back({s, g.face_of(s), g.position_of(s), g.edge(e).theta});
        }
    }
    return out;
}

std::vector<double> vertex_cone_angles(const WeightedCellGraph& g)
{
    std::vector<double> alpha(g.num_vertices(), 0.0);
    for (const Edge& e : g.edges()) {
        alpha[e.ends[0]] += kPi - e.theta;
        alpha[e.ends[1]] += kPi - e.theta;
    }
    return alpha;
}

CurvatureTarget make_target(const WeightedCellGraph& g, std::vector<double> values)
{
    if (values.size() != g.num_faces()) {
        invalid("target has " + std::to_string(values.size()) + " values for " + std::to_string(g.num_faces())
                + " faces");
    }
    for (std::size_t f = 0; f < values.size(); ++f) {
        if (!std::isfinite(values[f]) || values[f] <= 0.0) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "target for face " << g.face(f).id.str() << " must be positive, got " << values[f];
            invalid(msg.str());
        }
    }
    return CurvatureTarget{std::move(values)};
}

// ---------------------------------------------------------------------------
// JSON documents

namespace
{

using nlohmann::json;
using nlohmann::ordered_json;

Label read_label(const json& j, const std::string& where)
{
    if (j.is_number_unsigned()) {
        return Label{j.get<std::uint64_t>()};
    }
    if (j.is_number_integer()) {
        throw ParseError(where + ": id must be a non-negative integer or a string");
    }
    if (j.is_string()) {
        return Label{j.get<std::string>()};
    }
    throw ParseError(where + ": id must be a non-negative integer or a string");
}

ordered_json write_label(const Label& l)
{
    return l.is_number() ? ordered_json(l.number()) : ordered_json(l.text());
}

const json& require(const json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing \"" + key + "\"");
    }
    return *it;
}

double read_number(const json& j, const std::string& where)
{
    if (!j.is_number()) {
        throw ParseError(where + ": expected a number");
    }
    return j.get<double>();
}

CurvatureTarget read_targets(const WeightedCellGraph& g, const json& j)
{
    if (!j.is_object()) {
        throw ParseError("targets: expected an object mapping face id to T_f");
    }
    std::vector<double> values(g.num_faces(), 0.0);
    std::vector<char> given(g.num_faces(), 0);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto f = g.find_face(it.key());
        if (!f) {
            throw ValidationError("targets: unknown face id " + it.key());
        }
        values[*f] = read_number(it.value(), "targets[" + it.key() + "]");
        given[*f] = 1;
    }
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        if (!given[f]) {
            throw ValidationError("targets: missing face " + g.face(f).id.str());
        }
    }
    return make_target(g, std::move(values));
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
}

}  // namespace

GraphDocument parse_graph(std::string_view text, const ValidationOptions& options)
{
    const json doc = parse_json(text);
    if (!doc.is_object()) {
        throw ParseError("document must be a JSON object");
    }
    try {
        const json& jv = require(doc, "vertices", "document");
        if (!jv.is_number_unsigned()) {
            throw ParseError("\"vertices\" must be a non-negative integer count");
        }
        const auto num_vertices = jv.get<std::size_t>();

        const json& je = require(doc, "edges", "document");
        if (!je.is_array()) {
            throw ParseError("\"edges\" must be an array");
        }
        std::vector<Edge> edges;
        std::unordered_map<std::string, std::size_t> edge_index;
        for (std::size_t i = 0; i < je.size(); ++i) {
            const std::string where = "edges[" + std::to_string(i) + "]";
            const json& item = je[i];
            if (!item.is_object()) {
                throw ParseError(where + ": expected an object");
            }
            Edge e;
            e.id = read_label(require(item, "id", where), where);
            const json& ends = require(item, "v", where);
            if (!ends.is_array() || ends.size() != 2 || !ends[0].is_number_unsigned()
                || !ends[1].is_number_unsigned()) {
                throw ParseError(where + ": \"v\" must be a pair of vertex indices");
            }
            e.ends = {ends[0].get<std::size_t>(), ends[1].get<std::size_t>()};
            e.theta = read_number(require(item, "theta", where), where + ".theta");
            if (!edge_index.emplace(e.id.str(), i).second) {
                throw ValidationError("duplicate edge id " + e.id.str());
            }
            edges.push_back(std::move(e));
        }

        const json& jf = require(doc, "faces", "document");
        if (!jf.is_array()) {
            throw ParseError("\"faces\" must be an array");
        }
        std::vector<Face> faces;
        for (std::size_t i = 0; i < jf.size(); ++i) {
            const std::string where = "faces[" + std::to_string(i) + "]";
            const json& item = jf[i];
            if (!item.is_object()) {
                throw ParseError(where + ": expected an object");
            }
            Face f;
            f.id = read_label(require(item, "id", where), where);
            const json& boundary = require(item, "boundary", where);
            if (!boundary.is_array()) {
                throw ParseError(where + ": \"boundary\" must be an array");
            }
            for (const json& side : boundary) {
                if (!side.is_array() || side.size() != 2 || !side[1].is_string()) {
                    throw ParseError(where + ": each side must be [edge_id, \"+\"|\"-\"]");
                }
                const Label eid = read_label(side[0], where);
                const auto it = edge_index.find(eid.str());
                if (it == edge_index.end()) {
                    throw ValidationError(where + ": unknown edge id " + eid.str());
                }
                const auto sign = side[1].get<std::string>();
                if (sign != "+" && sign != "-") {
                    throw ParseError(where + ": side orientation must be \"+\" or \"-\"");
                }
                f.boundary.push_back({it->second, sign == "+" ? Orientation::Plus : Orientation::Minus});
            }
            faces.push_back(std::move(f));
        }

        WeightedCellGraph graph(num_vertices, std::move(edges), std::move(faces), options);
        std::optional<CurvatureTarget> targets;
        if (auto it = doc.find("targets"); it != doc.end()) {
            targets = read_targets(graph, *it);
        }
        return GraphDocument{std::move(graph), std::move(targets)};
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
}

CurvatureTarget parse_targets(const WeightedCellGraph& g, std::string_view text)
{
    const json doc = parse_json(text);
    if (doc.is_object() && doc.contains("targets") && doc["targets"].is_object()) {
        return read_targets(g, doc["targets"]);
    }
    return read_targets(g, doc);
}

std::string serialize_graph(const WeightedCellGraph& g, const CurvatureTarget* targets)
{
    ordered_json doc;
    doc["vertices"] = g.num_vertices();
    ordered_json edges = ordered_json::array();
    for (const Edge& e : g.edges()) {
        ordered_json item;
        item["id"] = write_label(e.id);
        item["v"] = {e.ends[0], e.ends[1]};
        item["theta"] = e.theta;
        edges.push_back(std::move(item));
    }
    doc["edges"] = std::move(edges);
    ordered_json faces = ordered_json::array();
    for (const Face& f : g.faces()) {
        ordered_json item;
        item["id"] = write_label(f.id);
        ordered_json boundary = ordered_json::array();
        for (const Side& s : f.boundary) {
            boundary.push_back({write_label(g.edge(s.edge).id), std::string(1, orientation_symbol(s.orientation))});
        }
        item["boundary"] = std::move(boundary);
        faces.push_back(std::move(item));
    }
    doc["faces"] = std::move(faces);
    if (targets != nullptr) {
        ordered_json t = ordered_json::object();
        for (std::size_t f = 0; f < g.num_faces(); ++f) {
            t[g.face(f).id.str()] = targets->values.at(f);
        }
        doc["targets"] = std::move(t);
    }
    return doc.dump(2);
}

}  // namespace circlepat
