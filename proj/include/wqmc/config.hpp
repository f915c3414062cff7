#pragma once

#include "wqmc/measures.hpp"
#include "wqmc/weights.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wqmc {

/// {"type":"product","gamma":[...]}, {"type":"pod","Gamma":[...],"gamma":[...]},
/// {"type":"pod","Gamma_factorial_power":l,"gamma":[...]},
/// {"type":"general","s":3,"entries":[{"u":[1,3],"w":0.5},...]} (u is 1-based).
WeightScheme weights_from_json(const nlohmann::json& j);

/// {"a":[...],"b":[...]}.
Cube cube_from_json(const nlohmann::json& j);

/// {"kind":"uniform","a":..,"b":..}, {"kind":"linear"}, {"kind":"trunc_exp","rate":..,"a":..,"b":..},
/// {"kind":"table","path":..}. Relative table paths resolve against base_dir.
CoordinateMeasure measure_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Command-line shorthands, or inline JSON ("{...}") or "@file.json".
///   prod:g1,g2,...   prod-const:g   prod-pow:alpha (gamma_i = i^-alpha)
///   pod-fact:lambda:g1,g2,...   pod-fact-pow:lambda:alpha   (Gamma_t = (t!)^lambda)
/// `s` sizes the const/pow forms and is the minimum accepted dimension.
WeightScheme parse_weights_spec(const std::string& spec, std::size_t s);

///   unit   side:L   a1,a2,...:b1,b2,...   inline JSON   @file.json
Cube parse_cube_spec(const std::string& spec, std::size_t s);

///   uniform:a:b   linear   trunc_exp:rate:a:b   table:path   inline JSON (object or array)   @file.json
/// A single measure is repeated for all s coordinates.
std::vector<CoordinateMeasure> parse_measure_specs(const std::vector<std::string>& specs, std::size_t s);

/// Reads and parses a JSON file; parse failures become ParseError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace wqmc
