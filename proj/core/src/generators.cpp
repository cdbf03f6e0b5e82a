#include "circlepat/generators.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace circlepat::generators
{
namespace
{

std::string edge_label(std::size_t i)
{
    return "e" + std::to_string(i);
}

std::string face_label(std::size_t i)
{
    return "f" + std::to_string(i);
}

// Closed orientable surface from vertex cycles listed with a consistent
// orientation: every undirected edge must be traversed once in each
// direction. The side running from the smaller to the larger vertex is +.
WeightedCellGraph from_oriented_polygons(std::size_t num_vertices,
                                         const std::vector<std::vector<std::size_t>>& cycles, double theta)
{
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    std::vector<Edge> edges;
    std::vector<Face> faces;
    for (std::size_t f = 0; f < cycles.size(); ++f) {
        Face face{face_label(f), {}};
        const auto& cyc = cycles[f];
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            const std::size_t a = cyc[i];
            const std::size_t b = cyc[(i + 1) % cyc.size()];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = index.emplace(key, edges.size());
            if (inserted) {
                edges.push_back(Edge{edge_label(edges.size()), {key.first, key.second}, theta});
            }
            face.boundary.push_back({it->second, a < b ? Orientation::Plus : Orientation::Minus});
        }
        faces.push_back(std::move(face));
    }
    return WeightedCellGraph(num_vertices, std::move(edges), std::move(faces));
}

class Corners
{
public:
    explicit Corners(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            x = parent_[x] = parent_[parent_[x]];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

WeightedCellGraph digon_sphere(double theta)
{
    return digon_sphere(theta, theta);
}

WeightedCellGraph digon_sphere(double theta0, double theta1)
{
    std::vector<Edge> edges{{"e0", {0, 1}, theta0}, {"e1", {0, 1}, theta1}};
    std::vector<Face> faces{
        {"f0", {{0, Orientation::Plus}, {1, Orientation::Plus}}},
        {"f1", {{0, Orientation::Minus}, {1, Orientation::Minus}}},
    };
    return WeightedCellGraph(2, std::move(edges), std::move(faces));
}

WeightedCellGraph loop_face(double theta)
{
    std::vector<Edge> edges{{"e0", {0, 0}, theta}};
    std::vector<Face> faces{{"f0", {{0, Orientation::Plus}, {0, Orientation::Minus}}}};
    return WeightedCellGraph(1, std::move(edges), std::move(faces));
}

WeightedCellGraph tetrahedron(double theta)
{
    return from_oriented_polygons(4, {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}, theta);
}

WeightedCellGraph one_vertex_torus(double theta_a, double theta_b)
{
    std::vector<Edge> edges{{"a", {0, 0}, theta_a}, {"b", {0, 0}, theta_b}};
    std::vector<Face> faces{{"f0",
                             {{0, Orientation::Plus},
                              {1, Orientation::Plus},
                              {0, Orientation::Minus},
                              {1, Orientation::Minus}}}};
    return WeightedCellGraph(1, std::move(edges), std::move(faces));
}

WeightedCellGraph cube(double theta)
{
    // vertex index = x + 2y + 4z
    return from_oriented_polygons(
        8, {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}}, theta);
}

WeightedCellGraph random_polygon_gluing(std::mt19937_64& rng, const RandomGluingOptions& options)
{
    const std::size_t F = std::max<std::size_t>(1, options.num_faces);
    const std::size_t max_degree = std::max<std::size_t>(1, options.max_face_degree);
    std::uniform_int_distribution<std::size_t> degree_dist(1, max_degree);
    std::uniform_real_distribution<double> theta_dist(options.theta_min, kHalfPi);

    for (;;) {
        std::vector<std::size_t> degree(F);
        for (auto& d : degree) {
            d = degree_dist(rng);
        }
        const std::size_t total = std::accumulate(degree.begin(), degree.end(), std::size_t{0});
        if (total % 2 == 1) {
            if (degree[0] < max_degree || degree[0] == 1) {
                ++degree[0];
            } else {
                --degree[0];
            }
        }

        // corner (f, p) is the start of side p of face f
        std::vector<std::size_t> first_corner(F + 1, 0);
        for (std::size_t f = 0; f < F; ++f) {
            first_corner[f + 1] = first_corner[f] + degree[f];
        }
        const std::size_t num_sides = first_corner[F];
        std::vector<std::size_t> order(num_sides);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);

        std::vector<std::size_t> face_of(num_sides);
        for (std::size_t f = 0; f < F; ++f) {
            for (std::size_t c = first_corner[f]; c < first_corner[f + 1]; ++c) {
                face_of[c] = f;
            }
        }
        auto next_corner = [&](std::size_t c) {
            const std::size_t f = face_of[c];
            return c + 1 == first_corner[f + 1] ? first_corner[f] : c + 1;
        };

        Corners faces_joined(F);
        Corners vertices(num_sides);
        const std::size_t E = num_sides / 2;
        for (std::size_t e = 0; e < E; ++e) {
            const std::size_t plus = order[2 * e];
            const std::size_t minus = order[2 * e + 1];
            faces_joined.unite(face_of[plus], face_of[minus]);
            // the minus side runs against the plus side
            vertices.unite(minus, next_corner(plus));
            vertices.unite(next_corner(minus), plus);
        }
        bool connected = true;
        for (std::size_t f = 1; f < F; ++f) {
            connected = connected && faces_joined.find(f) == faces_joined.find(0);
        }
        if (!connected) {
            continue;
        }

        std::map<std::size_t, std::size_t> vertex_id;
        for (std::size_t c = 0; c < num_sides; ++c) {
            vertex_id.emplace(vertices.find(c), vertex_id.size());
        }
        std::vector<Edge> edges(E);
        std::vector<Side> side_at(num_sides);
        for (std::size_t e = 0; e < E; ++e) {
            const std::size_t plus = order[2 * e];
            const std::size_t minus = order[2 * e + 1];
            edges[e] = Edge{edge_label(e),
                            {vertex_id.at(vertices.find(plus)), vertex_id.at(vertices.find(next_corner(plus)))},
                            theta_dist(rng)};
            side_at[plus] = {e, Orientation::Plus};
            side_at[minus] = {e, Orientation::Minus};
        }
        std::vector<Face> faces(F);
        for (std::size_t f = 0; f < F; ++f) {
            faces[f].id = face_label(f);
            for (std::size_t c = first_corner[f]; c < first_corner[f + 1]; ++c) {
                faces[f].boundary.push_back(side_at[c]);
            }
        }
        ValidationOptions strict;
        strict.require_closed_surface = true;
        return WeightedCellGraph(vertex_id.size(), std::move(edges), std::move(faces), strict);
    }
}

}  // namespace circlepat::generators
