#include "hyperperc/serialize.hpp"

#include <fstream>
#include <sstream>

#include "hyperperc/errors.hpp"

namespace hyperperc::io {

using hypgeom::HalfSpace;
using hypgeom::Point;

const json& field(const json& j, const std::string& name) {
  if (!j.is_object()) throw InvalidArgument("expected a JSON object around field '" + name + "'");
  auto it = j.find(name);
  if (it == j.end()) throw InvalidArgument("missing field '" + name + "'");
  return *it;
}

double number_field(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw InvalidArgument("field '" + name + "' must be a number");
  return v.get<double>();
}

std::uint64_t integer_field(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw InvalidArgument("field '" + name + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

namespace {

std::vector<double> number_array(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_array()) throw InvalidArgument("field '" + name + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidArgument("field '" + name + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

int int_param(const json& j, const std::string& name) {
  const auto v = integer_field(j, name);
  if (v > 1'000'000) throw InvalidArgument("field '" + name + "' is out of range");
  return static_cast<int>(v);
}

}  // namespace

json to_json(const Point& p) { return {{"coords", std::vector<double>(p.coords().begin(), p.coords().end())}}; }

Point point_from_json(const json& j) {
  try {
    return Point(number_array(j, "coords"));
  } catch (const std::invalid_argument& e) {
    throw InvalidArgument(std::string("coords: ") + e.what());
  }
}

json to_json(const HalfSpace& h) {
  if (const auto* s = std::get_if<hypgeom::Hemisphere>(&h.shape()))
    return {{"kind", "hemisphere"}, {"center", s->center}, {"radius", s->radius}, {"side", s->inside ? "inside" : "outside"}};
  const auto& v = std::get<hypgeom::Vertical>(h.shape());
  return {{"kind", "vertical"}, {"normal", v.normal}, {"offset", v.offset}, {"side", v.side}};
}

HalfSpace halfspace_from_json(const json& j) {
  const json& kind = field(j, "kind");
  if (kind == "hemisphere") {
    hypgeom::Hemisphere s;
    s.center = number_array(j, "center");
    s.radius = number_field(j, "radius");
    const json& side = field(j, "side");
    if (side != "inside" && side != "outside") throw InvalidArgument("field 'side' must be \"inside\" or \"outside\"");
    s.inside = side == "inside";
    if (!(s.radius > 0.0)) throw InvalidArgument("field 'radius' must be positive");
    return HalfSpace(s);
  }
  if (kind == "vertical") {
    hypgeom::Vertical v;
    v.normal = number_array(j, "normal");
    v.offset = number_field(j, "offset");
    const json& side = field(j, "side");
    if (!side.is_number_integer() || (side != 1 && side != -1)) throw InvalidArgument("field 'side' must be 1 or -1");
    v.side = side.get<int>();
    return HalfSpace(v);
  }
  throw InvalidArgument("field 'kind' must be \"hemisphere\" or \"vertical\"");
}

json to_json(const graphs::Family& f) {
  switch (f.kind) {
    case graphs::FamilyKind::tree: return {{"kind", "tree"}, {"k", f.k}};
    case graphs::FamilyKind::grid: return {{"kind", "grid"}, {"d", f.d}};
    case graphs::FamilyKind::tiling: return {{"kind", "tiling"}, {"p", f.p}, {"q", f.q}};
  }
  return {};
}

graphs::Family family_from_json(const json& j) {
  const json& kind = field(j, "kind");
  graphs::Family f;
  if (kind == "tree") {
    f = graphs::Family::tree(int_param(j, "k"));
    if (f.k < 2) throw InvalidArgument("field 'k' must be at least 2");
  } else if (kind == "grid") {
    f = graphs::Family::grid(int_param(j, "d"));
    if (f.d < 1) throw InvalidArgument("field 'd' must be at least 1");
  } else if (kind == "tiling") {
    f = graphs::Family::tiling(int_param(j, "p"), int_param(j, "q"));
    if ((f.p - 2) * (f.q - 2) <= 4) throw InvalidArgument("fields 'p','q' must satisfy (p-2)(q-2) > 4");
  } else {
    throw InvalidArgument("field 'kind' must be \"tree\", \"grid\" or \"tiling\"");
  }
  return f;
}

json to_json(const graphs::GraphWindow& w) {
  json j;
  const json fam = to_json(w.family());
  j["family"] = fam["kind"];
  json params = fam;
  params.erase("kind");
  j["params"] = params;
  j["R"] = w.radius();
  j["adjacency"] = {{"offsets", w.offsets()}, {"targets", w.targets()}};
  if (w.has_embedding()) {
    const auto& e = w.embedding();
    json coords = json::array();
    for (const auto& p : e.coords) coords.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
    j["coords"] = coords;
    if (e.lambda) j["lambda"] = *e.lambda;
    if (e.defect) j["defect"] = *e.defect;
  }
  return j;
}

graphs::GraphWindow window_from_json(const json& j) {
  json fam = field(j, "params");
  if (!fam.is_object()) throw InvalidArgument("field 'params' must be an object");
  fam["kind"] = field(j, "family");
  const auto family = family_from_json(fam);
  const int radius = int_param(j, "R");
  const json& adj = field(j, "adjacency");
  std::vector<std::int64_t> offsets;
  std::vector<graphs::Vertex> targets;
  try {
    offsets = field(adj, "offsets").get<std::vector<std::int64_t>>();
    targets = field(adj, "targets").get<std::vector<graphs::Vertex>>();
  } catch (const json::exception&) {
    throw InvalidArgument("field 'adjacency' must hold integer arrays 'offsets' and 'targets'");
  }
  if (offsets.empty() || offsets.front() != 0 || static_cast<std::size_t>(offsets.back()) != targets.size())
    throw InvalidArgument("field 'adjacency.offsets' is inconsistent with 'targets'");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] < offsets[i - 1]) throw InvalidArgument("field 'adjacency.offsets' must be non-decreasing");
  const auto n = static_cast<graphs::Vertex>(offsets.size() - 1);
  for (auto t : targets)
    if (t < 0 || t >= n) throw InvalidArgument("field 'adjacency.targets' has an out-of-range vertex");
  graphs::GraphWindow w(family, radius, std::move(offsets), std::move(targets));
  if (j.contains("coords")) {
    graphs::Embedding e;
    const json& c = j["coords"];
    if (!c.is_array() || c.size() != static_cast<std::size_t>(n))
      throw InvalidArgument("field 'coords' must hold one point per vertex");
    for (const auto& p : c) {
      try {
        e.coords.emplace_back(p.get<std::vector<double>>());
      } catch (const std::exception&) {
        throw InvalidArgument("field 'coords' holds an invalid point");
      }
    }
    if (j.contains("lambda")) e.lambda = number_field(j, "lambda");
    if (j.contains("defect")) e.defect = number_field(j, "defect");
    w.set_embedding(std::move(e));
  }
  return w;
}

json to_json(const gromov::MagicWitness& w) {
  json hs = json::array();
  for (const auto& h : w.halfspaces) hs.push_back(to_json(h));
  return {{"halfspaces", hs}, {"leftover", w.leftover}, {"dist", w.distance}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

}  // namespace hyperperc::io
