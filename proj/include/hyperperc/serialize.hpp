#pragma once

// JSON forms of points, half-spaces, windows and magic witnesses. Readers
// throw InvalidArgument with the offending field named.

#include <string>

#include <json.hpp>

#include "hyperperc/graphs.hpp"
#include "hyperperc/gromov.hpp"
#include "hyperperc/hypgeom.hpp"

namespace hyperperc::io {

using nlohmann::json;

json to_json(const hypgeom::Point& p);
hypgeom::Point point_from_json(const json& j);

json to_json(const hypgeom::HalfSpace& h);
hypgeom::HalfSpace halfspace_from_json(const json& j);

json to_json(const graphs::Family& f);
graphs::Family family_from_json(const json& j);

// {family, params, R, offsets, targets, coords?, lambda?, defect?}
json to_json(const graphs::GraphWindow& w);
graphs::GraphWindow window_from_json(const json& j);

json to_json(const gromov::MagicWitness& w);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Field access with schema errors that name the field.
const json& field(const json& j, const std::string& name);
double number_field(const json& j, const std::string& name);
std::uint64_t integer_field(const json& j, const std::string& name);

}  // namespace hyperperc::io
