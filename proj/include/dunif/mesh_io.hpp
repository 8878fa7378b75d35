#pragma once

#include "dunif/mesh_core.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace dunif {

// Connectivity plus per-edge lengths, before a geometry tag is attached.
struct MeshData {
  std::shared_ptr<const Triangulation> triangulation;
  std::vector<double> lengths; // indexed like triangulation->edges()
};

// Mesh-with-lengths text format:
//   tml 1
//   V F
//   F lines "i j k" (0-based, consistently oriented)
//   E lines "i j length" with i < j, in lexicographic order
// Whitespace separated; '#' starts a comment. Throws ParseError on malformed
// input and the Triangulation::build errors on bad connectivity.
MeshData read_tml(std::istream& in);
MeshData read_tml_file(const std::string& path);

// Lengths are written with 17 significant digits so that the file re-parses to
// the identical metric.
void write_tml(std::ostream& out, const Triangulation& t, std::span<const double> lengths);
void write_tml_file(const std::string& path, const Triangulation& t, std::span<const double> lengths);

// Standard OFF with 3D coordinates and triangular faces. Edge lengths are the
// chordal Euclidean distances between vertex positions, which only
// approximate geodesic lengths of the underlying surface.
MeshData read_off(std::istream& in);
MeshData read_off_file(const std::string& path);

// Reads by extension: ".off" uses the OFF reader, everything else TML.
MeshData read_mesh_file(const std::string& path);

} // namespace dunif
