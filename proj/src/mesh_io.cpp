#include "dunif/mesh_io.hpp"

#include "dunif/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace dunif {

namespace {

// Whitespace tokenizer that drops '#' comments and remembers line numbers.
class Tokenizer {
public:
  explicit Tokenizer(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({std::move(tok), lineno});
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }

  const std::string& next(const char* what) {
    if (done()) throw Error(ErrorCode::ParseError, std::string("unexpected end of input, expected ") + what);
    return tokens_[pos_++].text;
  }

  long long next_int(const char* what) {
    const std::string& tok = next(what);
    long long v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail(std::string("expected integer ") + what);
    return v;
  }

  double next_double(const char* what) {
    const std::string& tok = next(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail(std::string("expected number ") + what);
    }
    if (used != tok.size()) fail(std::string("expected number ") + what);
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const int line = pos_ == 0 ? 0 : tokens_[pos_ - 1].line;
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
  }

private:
  struct Token {
    std::string text;
    int line;
  };
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return in;
}

} // namespace

MeshData read_tml(std::istream& in) {
  Tokenizer tok(in);
  if (tok.next("header") != "tml") tok.fail("missing 'tml' header");
  if (tok.next_int("format version") != 1) tok.fail("unsupported tml version");
  const long long nv = tok.next_int("vertex count");
  const long long nf = tok.next_int("face count");
  if (nv <= 0 || nf <= 0) tok.fail("vertex and face counts must be positive");

  std::vector<Face> faces(static_cast<std::size_t>(nf));
  for (auto& f : faces) {
    for (int& v : f) {
      const long long idx = tok.next_int("face vertex index");
      if (idx < 0 || idx >= nv) tok.fail("face vertex index out of range");
      v = static_cast<int>(idx);
    }
  }
  auto t = std::make_shared<const Triangulation>(Triangulation::build(std::move(faces)));
  if (t->vertex_count() != nv) tok.fail("vertex count does not match the faces");

  std::vector<double> lengths(t->edge_count(), -1.0);
  for (int n = 0; n < t->edge_count(); ++n) {
    const long long i = tok.next_int("edge endpoint");
    const long long j = tok.next_int("edge endpoint");
    const double len = tok.next_double("edge length");
    if (i < 0 || j < 0 || i >= nv || j >= nv) tok.fail("edge endpoint out of range");
    const int e = t->find_edge(static_cast<int>(i), static_cast<int>(j));
    if (e < 0) tok.fail("edge is not part of the triangulation");
    if (lengths[e] >= 0.0) tok.fail("edge listed twice");
    if (!(len > 0.0) || !std::isfinite(len)) tok.fail("edge length must be positive");
    lengths[e] = len;
  }
  if (!tok.done()) tok.fail("trailing data after edge list");
  return {std::move(t), std::move(lengths)};
}

MeshData read_tml_file(const std::string& path) {
  auto in = open_input(path);
  return read_tml(in);
}

void write_tml(std::ostream& out, const Triangulation& t, std::span<const double> lengths) {
  out << "tml 1\n" << t.vertex_count() << ' ' << t.face_count() << '\n';
  for (const Face& f : t.faces()) out << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  const auto old_precision = out.precision(17);
  for (int e = 0; e < t.edge_count(); ++e) {
    out << t.edge(e).v0 << ' ' << t.edge(e).v1 << ' ' << lengths[e] << '\n';
  }
  out.precision(old_precision);
}

void write_tml_file(const std::string& path, const Triangulation& t, std::span<const double> lengths) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  write_tml(out, t, lengths);
}

MeshData read_off(std::istream& in) {
  Tokenizer tok(in);
  const std::string& header = tok.next("header");
  if (header != "OFF") tok.fail("missing OFF header");
  const long long nv = tok.next_int("vertex count");
  const long long nf = tok.next_int("face count");
  tok.next_int("edge count");
  if (nv <= 0 || nf <= 0) tok.fail("vertex and face counts must be positive");

  std::vector<Eigen::Vector3d> pos(static_cast<std::size_t>(nv));
  for (auto& p : pos) {
    for (int k = 0; k < 3; ++k) p[k] = tok.next_double("coordinate");
  }
  std::vector<Face> faces(static_cast<std::size_t>(nf));
  for (auto& f : faces) {
    if (tok.next_int("face degree") != 3) tok.fail("only triangular faces are supported");
    for (int& v : f) {
      const long long idx = tok.next_int("face vertex index");
      if (idx < 0 || idx >= nv) tok.fail("face vertex index out of range");
      v = static_cast<int>(idx);
    }
  }
  auto t = std::make_shared<const Triangulation>(Triangulation::build(std::move(faces)));
  if (t->vertex_count() != nv) tok.fail("unreferenced vertices in OFF input");
  std::vector<double> lengths(t->edge_count());
  for (int e = 0; e < t->edge_count(); ++e) {
    lengths[e] = (pos[t->edge(e).v0] - pos[t->edge(e).v1]).norm();
  }
  return {std::move(t), std::move(lengths)};
}

MeshData read_off_file(const std::string& path) {
  auto in = open_input(path);
  return read_off(in);
}

MeshData read_mesh_file(const std::string& path) {
  const bool is_off = path.size() >= 4 && (path.ends_with(".off") || path.ends_with(".OFF"));
  return is_off ? read_off_file(path) : read_tml_file(path);
}

} // namespace dunif
