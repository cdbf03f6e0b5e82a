#pragma once

// Combinatorial model of a weighted cellular graph on a closed surface.
//
// Faces are given as cyclic walks of sides; a side is an edge together with
// one of its two orientations. Every edge has exactly two sides, which may
// lie on the same face. Loops and multi-edges are allowed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace circlepat
{

enum class Orientation : std::uint8_t
{
    Plus,
    Minus,
};

[[nodiscard]] constexpr char orientation_symbol(Orientation o) noexcept
{
    return o == Orientation::Plus ? '+' : '-';
}

[[nodiscard]] constexpr Orientation opposite(Orientation o) noexcept
{
    return o == Orientation::Plus ? Orientation::Minus : Orientation::Plus;
}

struct Side
{
    std::size_t edge = 0;
    Orientation orientation = Orientation::Plus;

    friend bool operator==(const Side&, const Side&) = default;
};

/// Index of a side in the 2|E| oriented-edge numbering: e+ -> 2e, e- -> 2e+1.
[[nodiscard]] constexpr std::size_t side_index(Side s) noexcept
{
    return 2 * s.edge + (s.orientation == Orientation::Minus ? 1 : 0);
}

/// Edge or face identifier as written in a document: a non-negative
/// integer or a string. Two labels with the same text form are the same
/// label as far as lookups are concerned.
class Label
{
public:
    Label() = default;
    Label(std::uint64_t number) : value_{number} {}       // NOLINT(implicit)
    Label(std::string text) : value_{std::move(text)} {}  // NOLINT(implicit)
    Label(const char* text) : value_{std::string{text}} {}  // NOLINT(implicit)

    [[nodiscard]] bool is_number() const noexcept { return std::holds_alternative<std::uint64_t>(value_); }
    [[nodiscard]] std::uint64_t number() const { return std::get<std::uint64_t>(value_); }
    [[nodiscard]] const std::string& text() const { return std::get<std::string>(value_); }
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Label&, const Label&) = default;

private:
    std::variant<std::uint64_t, std::string> value_{std::uint64_t{0}};
};

struct Edge
{
    Label id;
    std::array<std::size_t, 2> ends{};
    double theta = 0.0;  // bigon angle, (0, pi/2]

    [[nodiscard]] bool is_loop() const noexcept { return ends[0] == ends[1]; }
};

struct Face
{
    Label id;
    std::vector<Side> boundary;  // cyclic
};

struct ValidationOptions
{
    /// Report a side repeated within one face walk with a face-specific
    /// message before the global two-sides-per-edge count runs.
    bool strict_sides = true;
    /// Additionally require the link of every vertex to be a single circle,
    /// i.e. the gluing is a closed surface and not a pinched one.
    bool require_closed_surface = false;
};

/// Sector of the triangulation obtained by coning every face to an interior
/// point; identified with a side of an edge.
struct OrientedEdge
{
    Side side;
    std::size_t face = 0;
    std::size_t position = 0;  // index of the side in the face boundary
    double theta = 0.0;
};

class WeightedCellGraph
{
public:
    /// Validates every structural invariant; throws ValidationError naming
    /// the first violation found.
    WeightedCellGraph(std::size_t num_vertices, std::vector<Edge> edges, std::vector<Face> faces,
                      const ValidationOptions& options = {});

    [[nodiscard]] std::size_t num_vertices() const noexcept { return num_vertices_; }
    [[nodiscard]] std::size_t num_edges() const noexcept { return edges_.size(); }
    [[nodiscard]] std::size_t num_faces() const noexcept { return faces_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<Face>& faces() const noexcept { return faces_; }
    [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_.at(e); }
    [[nodiscard]] const Face& face(std::size_t f) const { return faces_.at(f); }

    /// f(t): the face whose boundary contains the side.
    [[nodiscard]] std::size_t face_of(Side s) const { return side_face_.at(side_index(s)); }
    /// Position of the side inside that face's boundary.
    [[nodiscard]] std::size_t position_of(Side s) const { return side_position_.at(side_index(s)); }
    /// True when the face walk runs along the side from ends[0] to ends[1].
    [[nodiscard]] bool runs_forward(Side s) const { return side_forward_.at(side_index(s)) != 0; }
    [[nodiscard]] std::size_t start_vertex(Side s) const;
    [[nodiscard]] std::size_t end_vertex(Side s) const;

    [[nodiscard]] long euler_characteristic() const noexcept;

    [[nodiscard]] std::optional<std::size_t> find_face(std::string_view label) const;
    [[nodiscard]] std::optional<std::size_t> find_edge(std::string_view label) const;

private:
    void validate(const ValidationOptions& options);

    std::size_t num_vertices_ = 0;
    std::vector<Edge> edges_;
    std::vector<Face> faces_;
    std::vector<std::size_t> side_face_;
    std::vector<std::size_t> side_position_;
    std::vector<char> side_forward_;
};

/// All 2|E| sectors, in side_index order.
std::vector<OrientedEdge> oriented_edges(const WeightedCellGraph& g);

/// Cone angle at every vertex: sum of (pi - theta_e) over edge-ends at the
/// vertex, a loop contributing twice.
std::vector<double> vertex_cone_angles(const WeightedCellGraph& g);

/// Prescribed total geodesic curvature per face, indexed like g.faces().
struct CurvatureTarget
{
    std::vector<double> values;
};

/// Checks size and positivity against `g`; throws ValidationError.
CurvatureTarget make_target(const WeightedCellGraph& g, std::vector<double> values);

struct GraphDocument
{
    WeightedCellGraph graph;
    std::optional<CurvatureTarget> targets;
};

/// Parses the JSON input format:
///   {"vertices": V,
///    "edges": [{"id": .., "v": [a, b], "theta": ..}, ..],
///    "faces": [{"id": .., "boundary": [[edge_id, "+"|"-"], ..]}, ..],
///    "targets": {face_id: T_f, ..}}          (targets optional)
/// Throws ParseError for malformed text and ValidationError for documents
/// that describe an invalid graph.
GraphDocument parse_graph(std::string_view text, const ValidationOptions& options = {});

/// Parses a standalone targets object {face_id: T_f, ..}.
CurvatureTarget parse_targets(const WeightedCellGraph& g, std::string_view text);

/// Canonical JSON form; parse_graph(serialize_graph(g)) reproduces g.
std::string serialize_graph(const WeightedCellGraph& g, const CurvatureTarget* targets = nullptr);

}  // namespace circlepat
