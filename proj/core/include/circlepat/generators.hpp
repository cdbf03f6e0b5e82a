#pragma once

// Small cellular graphs used by tests, benchmarks and the sample inputs.

#include <cstddef>
#include <random>

#include "circlepat/cellgraph.hpp"
#include "circlepat/sphertrig.hpp"

namespace circlepat::generators
{

/// Two vertices joined by two edges; two faces, each bounded by one side
/// of both edges. Sphere, chi = 2.
WeightedCellGraph digon_sphere(double theta = kHalfPi);

/// Same as digon_sphere with independent edge weights.
WeightedCellGraph digon_sphere(double theta0, double theta1);

/// One vertex, one loop edge, one face bounded by both sides of the loop.
/// chi = 1; not a closed surface (the vertex link has two components).
WeightedCellGraph loop_face(double theta = kHalfPi);

/// Boundary of the tetrahedron: 4 vertices, 6 edges, 4 triangles.
WeightedCellGraph tetrahedron(double theta = kHalfPi);

/// One vertex, two loops a, b, one face with boundary a b a^-1 b^-1.
/// Torus, chi = 0.
WeightedCellGraph one_vertex_torus(double theta_a = kHalfPi, double theta_b = kHalfPi);

/// Boundary of the cube: 8 vertices, 12 edges, 6 quadrilaterals.
WeightedCellGraph cube(double theta = kHalfPi);

struct RandomGluingOptions
{
    std::size_t num_faces = 4;
    std::size_t max_face_degree = 4;  // faces get 1..max sides
    double theta_min = 0.2;           // weights uniform in [theta_min, pi/2]
};

/// Random closed orientable surface obtained by gluing polygons: the sides
/// of `num_faces` polygons are paired at random (retrying until the result
/// is connected) and vertices are the resulting classes of polygon corners.
/// May contain loops, multi-edges and monogons.
WeightedCellGraph random_polygon_gluing(std::mt19937_64& rng, const RandomGluingOptions& options = {});

}  // namespace circlepat::generators
