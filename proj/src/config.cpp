#include "wqmc/config.hpp"

#include "wqmc/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wqmc {

namespace {

using nlohmann::json;

std::vector<double> doubles(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_array()) throw std::invalid_argument(std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw std::invalid_argument(std::string("field '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument(std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

std::string text(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw std::invalid_argument(std::string("missing string field '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> number_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(item));
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

bool is_json_spec(const std::string& spec) {
    return !spec.empty() && (spec.front() == '{' || spec.front() == '[' || spec.front() == '@');
}

json json_spec(const std::string& spec) {
    if (spec.front() == '@') return read_json_file(spec.substr(1));
    try {
        return json::parse(spec);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("invalid inline JSON: ") + e.what());
    }
}

void require_dim(std::size_t have, std::size_t need, const char* what) {
    if (have < need) {
        throw std::invalid_argument(std::string(what) + " cover " + std::to_string(have) + " coordinates, need " +
                                    std::to_string(need));
    }
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
}

WeightScheme weights_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("weights must be a JSON object");
    const std::string type = text(j, "type");
    if (type == "product") return WeightScheme::product(doubles(j, "gamma"));
    if (type == "pod") {
        if (j.contains("Gamma_factorial_power")) {
            return WeightScheme::pod_factorial(number(j, "Gamma_factorial_power"), doubles(j, "gamma"));
        }
        return WeightScheme::pod(doubles(j, "Gamma"), doubles(j, "gamma"));
    }
    if (type == "general") {
        if (!j.contains("entries") || !j.at("entries").is_array()) {
            throw std::invalid_argument("general weights need an 'entries' array");
        }
        std::size_t s = 0;
        if (j.contains("s")) {
            s = j.at("s").get<std::size_t>();
        } else {
            for (const auto& e : j.at("entries")) {
                for (const auto& c : e.at("u")) s = std::max<std::size_t>(s, c.get<std::size_t>());
            }
        }
        require_enumerable(s, "general weights");
        std::vector<double> by_mask(std::size_t{1} << s, 0.0);
        for (const auto& e : j.at("entries")) {
            const auto coords = e.at("u").get<std::vector<int>>();
            const Subset u = subset_from_one_based(coords, s);
            if (u == 0) throw std::invalid_argument("general weight entries need a nonempty u");
            if (by_mask[u] != 0.0) throw std::invalid_argument("duplicate weight for " + subset_label(u));
            by_mask[u] = number(e, "w");
        }
        return WeightScheme::general(s, std::move(by_mask));
    }
    throw std::invalid_argument("unknown weight type '" + type + "' (product, pod, general)");
}

Cube cube_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("cube must be a JSON object");
    Cube c{doubles(j, "a"), doubles(j, "b")};
    c.validate();
    return c;
}

CoordinateMeasure measure_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw std::invalid_argument("measure must be a JSON object");
    const std::string kind = text(j, "kind");
    if (kind == "uniform") return CoordinateMeasure::uniform(number(j, "a"), number(j, "b"));
    if (kind == "linear") return CoordinateMeasure::linear();
    if (kind == "trunc_exp") return CoordinateMeasure::trunc_exp(number(j, "rate"), number(j, "a"), number(j, "b"));
    if (kind == "table") {
        std::filesystem::path p = text(j, "path");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return CoordinateMeasure::load_table(p);
    }
    throw std::invalid_argument("unknown measure kind '" + kind + "' (uniform, linear, trunc_exp, table)");
}

WeightScheme parse_weights_spec(const std::string& spec, std::size_t s) {
    WeightScheme w = [&] {
        if (is_json_spec(spec)) return weights_from_json(json_spec(spec));
        const auto colon = spec.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("weights spec needs 'kind:values'");
        const std::string kind = spec.substr(0, colon);
        const std::string rest = spec.substr(colon + 1);
        auto powers = [&](double alpha) {
            std::vector<double> g(s);
            for (std::size_t i = 0; i < s; ++i) g[i] = std::pow(static_cast<double>(i + 1), -alpha);
            return g;
        };
        if (kind == "prod") return WeightScheme::product(number_list(rest));
        if (kind == "prod-const") return WeightScheme::product(std::vector<double>(s, to_double(rest)));
        if (kind == "prod-pow") return WeightScheme::product(powers(to_double(rest)));
        if (kind == "pod-fact" || kind == "pod-fact-pow") {
            const auto parts = split(rest, ':');
            if (parts.size() != 2) throw std::invalid_argument(kind + " expects lambda:values");
            const double lambda = to_double(parts[0]);
            if (kind == "pod-fact") return WeightScheme::pod_factorial(lambda, number_list(parts[1]));
            return WeightScheme::pod_factorial(lambda, powers(to_double(parts[1])));
        }
        throw std::invalid_argument("unknown weights kind '" + kind + "'");
    }();
    require_dim(w.dim(), s, "weights");
    return w;
}

Cube parse_cube_spec(const std::string& spec, std::size_t s) {
    Cube c;
    if (is_json_spec(spec)) {
        c = cube_from_json(json_spec(spec));
    } else if (spec == "unit") {
        c = Cube::unit(s);
    } else if (spec.starts_with("side:")) {
        const double len = to_double(spec.substr(5));
        c = Cube{std::vector<double>(s, 0.0), std::vector<double>(s, len)};
    } else {
        const auto parts = split(spec, ':');
        if (parts.size() != 2) throw std::invalid_argument("cube spec must be unit, side:L or a-list:b-list");
        c = Cube{number_list(parts[0]), number_list(parts[1])};
    }
    c.validate();
    require_dim(c.dim(), s, "cube bounds");
    return c;
}

std::vector<CoordinateMeasure> parse_measure_specs(const std::vector<std::string>& specs, std::size_t s) {
    std::vector<CoordinateMeasure> out;
    for (const auto& spec : specs) {
        if (is_json_spec(spec)) {
            const json j = json_spec(spec);
            std::filesystem::path base;
            if (spec.front() == '@') base = std::filesystem::path(spec.substr(1)).parent_path();
            if (j.is_array()) {
                for (const auto& item : j) out.push_back(measure_from_json(item, base));
            } else {
                out.push_back(measure_from_json(j, base));
            }
            continue;
        }
        const auto parts = split(spec, ':');
        const std::string& kind = parts[0];
        if (kind == "linear" && parts.size() == 1) {
            out.push_back(CoordinateMeasure::linear());
        } else if (kind == "uniform" && parts.size() == 3) {
            out.push_back(CoordinateMeasure::uniform(to_double(parts[1]), to_double(parts[2])));
        } else if (kind == "trunc_exp" && parts.size() == 4) {
            out.push_back(
                CoordinateMeasure::trunc_exp(to_double(parts[1]), to_double(parts[2]), to_double(parts[3])));
        } else if (kind == "table" && parts.size() >= 2) {
            out.push_back(CoordinateMeasure::load_table(spec.substr(6)));
        } else {
            throw std::invalid_argument("bad measure spec '" + spec + "'");
        }
    }
    if (out.size() == 1 && s > 1) out.assign(s, out.front());
    if (out.size() != s) {
        throw std::invalid_argument("got " + std::to_string(out.size()) + " measures for dimension " +
                                    std::to_string(s));
    }
    return out;
}

}  // namespace wqmc
