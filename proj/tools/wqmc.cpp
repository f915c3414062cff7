// wqmc: command-line front end for the weighted QMC library.

#include "wqmc/bounds.hpp"
#include "wqmc/cbc.hpp"
#include "wqmc/config.hpp"
#include "wqmc/digital_net.hpp"
#include "wqmc/errors.hpp"
#include "wqmc/measures.hpp"
#include "wqmc/parallel.hpp"
#include "wqmc/poly_lattice.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace wqmc;

struct Options {
    unsigned threads = 1;
    bool no_timestamp = false;
    std::string config;
    std::uint64_t e_guard = kDefaultEGuard;
    std::uint64_t t_guard = kDefaultTGuard;

    // point sources
    bool plps = false;
    bool sobol = false;
    bool use_cbc = false;
    std::string matrices;
    std::string f;
    std::string g;
    std::size_t s = 0;
    int m = 0;
    std::string shift;
    std::uint64_t sequence = 0;
    int precision = 53;

    std::string weights;
    std::string cube = "unit";
    std::vector<std::string> measures;
    std::string integrand = "product";
    double value = 1.0;
    std::optional<double> reference;
    std::string q = "1";
    bool dual = false;
    std::size_t max_order = 0;
    int sequence_profile = 0;
    std::uint64_t n_points = 0;
    std::string condition;
    std::size_t s_max = 0;
    std::optional<double> sobol_c;
    std::string info;

    std::string format = "csv";
    std::string out;
    std::string decomposition;
};

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const Options& o, json doc) {
    if (!o.no_timestamp) doc["generated_at"] = timestamp();
    const std::string text = doc.dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot write " + o.out);
    file << text;
}

json hex_list(const std::vector<Gf2Poly>& g) {
    json a = json::array();
    for (Gf2Poly p : g) a.push_back(p.to_hex());
    return a;
}

json one_based(Subset u) {
    json a = json::array();
    for (auto i : subset_members(u)) a.push_back(i + 1);
    return a;
}

double parse_q(const std::string& text) {
    if (text == "inf" || text == "infinity") return kInfinity;
    std::size_t used = 0;
    double q = 0.0;
    try {
        q = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw std::invalid_argument("bad --q value '" + text + "'");
    return q;
}

PolyLatticeRule rule_from(const Options& o) {
    if (o.f.empty() || o.g.empty()) throw std::invalid_argument("a lattice rule needs --f and --g");
    PolyLatticeRule rule{Gf2Poly::from_hex(o.f), parse_poly_list(o.g)};
    rule.validate();
    return rule;
}

std::vector<std::uint64_t> parse_shift(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (Gf2Poly p : parse_poly_list(text)) out.push_back(p.bits());
    return out;
}

/// A 2^m-point set from exactly one of --plps, --sobol, --matrices.
struct NetSource {
    std::string kind;
    std::optional<PolyLatticeRule> rule;
    NetDefinition net;

    int m() const { return net.m; }
    std::size_t dim() const { return net.dim(); }
    json describe() const {
        json d{{"kind", kind}, {"m", net.m}, {"s", net.dim()}};
        if (rule) {
            d["f"] = rule->f.to_hex();
            d["g"] = hex_list(rule->g);
        }
        return d;
    }
    DyadicPointSet points() const { return rule ? plps(*rule) : generate_net(net); }
};

int source_count(const Options& o) {
    return int(o.plps) + int(o.sobol) + int(!o.matrices.empty()) + int(o.use_cbc);
}

NetSource net_source(const Options& o) {
    if (source_count(o) != 1) {
        throw std::invalid_argument("choose exactly one point source (--plps, --sobol, --matrices)");
    }
    NetSource src;
    if (o.plps) {
        src.kind = "plps";
        src.rule = rule_from(o);
        src.net = plps_net(*src.rule);
        if (!o.shift.empty()) throw std::invalid_argument("--shift applies to --sobol and --matrices only");
        return src;
    }
    if (o.sobol) {
        if (o.s < 1 || o.m < 1) throw std::invalid_argument("--sobol needs --s and --m");
        src.kind = "sobol";
        src.net.m = o.m;
        src.net.matrices = sobol_matrices(o.s, o.m);
    } else {
        src.kind = "matrices";
        src.net = load_matrices(o.matrices);
    }
    if (!o.shift.empty()) src.net.shift = parse_shift(o.shift);
    src.net.validate();
    return src;
}

std::vector<Subset> subsets_up_to(std::size_t s, std::size_t max_order) {
    require_enumerable(s, "subset table");
    std::vector<Subset> out;
    for (Subset u = 1; u <= full_subset(s); ++u) {
        if (max_order == 0 || static_cast<std::size_t>(subset_size(u)) <= max_order) out.push_back(u);
    }
    return out;
}

// ---------------------------------------------------------------- subcommands

void run_cbc(const Options& o) {
    if (o.f.empty()) throw std::invalid_argument("cbc needs --f");
    if (o.s < 1) throw std::invalid_argument("cbc needs --s");
    if (o.weights.empty()) throw std::invalid_argument("cbc needs --weights");
    const Gf2Poly f = Gf2Poly::from_hex(o.f);
    const WeightScheme w = parse_weights_spec(o.weights, o.s);
    const Cube cube = parse_cube_spec(o.cube, o.s);

    const CbcResult r = cbc_construct(f, o.s, w, cube);
    const int m = f.degree();
    const double rhs = average_formula(m, o.s, w, cube);
    json stages = json::array();
    for (std::size_t d = 0; d < r.g.size(); ++d) {
        stages.push_back({{"d", d + 1}, {"g", r.g[d].to_hex()}, {"B", r.stage_B[d]}, {"bound", r.stage_bound[d]}});
    }
    emit(o, {{"command", "cbc"},
             {"f", f.to_hex()},
             {"m", m},
             {"s", o.s},
             {"g", hex_list(r.g)},
             {"B", r.B},
             {"guarantee_rhs", rhs},
             {"guarantee_holds", r.B <= rhs},
             {"stages", stages}});
}

void run_points(const Options& o) {
    if (o.format != "csv" && o.format != "binary") throw std::invalid_argument("--format must be csv or binary");
    DyadicPointSet pts;
    int m_header = 0;
    std::optional<PrefixDecomposition> decomposition;
    if (o.sequence > 0) {
        if (o.plps) throw std::invalid_argument("--sequence needs --sobol or --matrices");
        if (source_count(o) != 1) throw std::invalid_argument("choose exactly one point source (--sobol, --matrices)");
        NetDefinition def;
        if (o.sobol) {
            if (o.s < 1) throw std::invalid_argument("--sobol needs --s");
            def.m = o.precision;
            def.matrices = sobol_matrices(o.s, o.precision);
        } else {
            def = load_matrices(o.matrices);
        }
        SequencePrefix prefix = sequence_prefix(def, o.sequence);
        pts = std::move(prefix.points);
        decomposition = std::move(prefix.decomposition);
        m_header = 0;
    } else {
        const NetSource src = net_source(o);
        pts = src.points();
        m_header = src.m();
    }

    if (!o.decomposition.empty()) {
        if (!decomposition) throw std::invalid_argument("--decomposition applies to --sequence");
        json blocks = json::array();
        for (const auto& b : decomposition->blocks) {
            json shift = json::array();
            for (auto v : b.shift) shift.push_back(Gf2Poly(v).to_hex());
            blocks.push_back({{"m", b.m}, {"offset", b.offset}, {"shift", shift}});
        }
        std::ofstream file(o.decomposition);
        if (!file) throw std::invalid_argument("cannot write " + o.decomposition);
        file << json{{"N", o.sequence}, {"precision", pts.precision()}, {"blocks", blocks}}.dump(2) << "\n";
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot write " + o.out);
        out = &file;
    }
    if (o.format == "csv") {
        write_points_csv(*out, pts);
    } else {
        write_points_binary(*out, pts, m_header);
    }
}

void run_criterion(const Options& o) {
    if (o.weights.empty()) throw std::invalid_argument("criterion needs --weights");
    const PolyLatticeRule rule = rule_from(o);
    const std::size_t s = rule.dim();
    const WeightScheme w = parse_weights_spec(o.weights, s);
    const Cube cube = parse_cube_spec(o.cube, s);
    const int m = rule.m();

    json doc{{"command", "criterion"}, {"f", rule.f.to_hex()}, {"g", hex_list(rule.g)}, {"m", m}, {"s", s}};
    doc["B"] = B_fast(plps(rule), m, w, cube);
    if (o.dual) {
        doc["B_dual"] = B_dual(rule, w, cube, o.e_guard);
        json e = json::array();
        for (Subset u : subsets_up_to(s, o.max_order)) {
            const Dyadic v = E_dual(rule, u, o.e_guard);
            e.push_back({{"u", one_based(u)}, {"E", v.to_string()}, {"E_value", v.to_double()}});
        }
        doc["E"] = e;
    }
    emit(o, doc);
}

void run_tvalue(const Options& o) {
    const NetSource src = net_source(o);
    json table = json::array();
    int t_max = 0;
    for (Subset u : subsets_up_to(src.dim(), o.max_order)) {
        const int t = exact_t(src.net, u, o.t_guard);
        t_max = std::max(t_max, t);
        table.push_back({{"u", one_based(u)}, {"t", t}});
    }
    json doc{{"command", "tvalue"}, {"source", src.describe()}, {"t", table}, {"t_max", t_max}};
    if (o.sequence_profile > 0) doc["sequence_t_profile"] = sequence_t_profile(src.net, o.sequence_profile, o.t_guard);
    emit(o, doc);
}

std::map<Subset, Dyadic> exact_E(const DyadicPointSet& pts, int m, std::size_t s, std::uint64_t guard) {
    std::map<Subset, Dyadic> out;
    for (Subset u : subsets_up_to(s, 0)) out[u] = E_walsh(pts, m, u, guard);
    return out;
}

void run_integrate(const Options& o) {
    if (o.measures.empty()) throw std::invalid_argument("integrate needs at least one --measure");
    std::size_t s = o.s;
    if (o.plps) s = parse_poly_list(o.g).size();
    if (!o.matrices.empty()) s = load_matrices(o.matrices).dim();
    if (s < 1) throw std::invalid_argument("cannot determine the dimension; pass --s");
    const std::vector<CoordinateMeasure> measures = parse_measure_specs(o.measures, s);
    Cube support{std::vector<double>(s), std::vector<double>(s)};
    for (std::size_t i = 0; i < s; ++i) {
        support.a[i] = measures[i].a();
        support.b[i] = measures[i].b();
    }
    std::optional<WeightScheme> w;
    if (!o.weights.empty()) w = parse_weights_spec(o.weights, s);

    json source;
    DyadicPointSet pts;
    int m = 0;
    if (o.use_cbc) {
        if (source_count(o) != 1) throw std::invalid_argument("choose exactly one point source");
        if (o.f.empty() || !w) throw std::invalid_argument("--cbc needs --f and --weights");
        const Gf2Poly f = Gf2Poly::from_hex(o.f);
        const CbcResult r = cbc_construct(f, s, *w, support);
        const PolyLatticeRule rule{f, r.g};
        pts = plps(rule);
        m = rule.m();
        source = {{"kind", "cbc"}, {"f", f.to_hex()}, {"g", hex_list(r.g)}, {"m", m}, {"s", s}};
    } else {
        const NetSource src = net_source(o);
        if (src.dim() != s) throw std::invalid_argument("point source dimension does not match --s");
        pts = src.points();
        m = src.m();
        source = src.describe();
    }

    const Integrand f = builtin_integrand(o.integrand, support, o.value);
    const double reference = o.reference ? *o.reference : f.reference(measures);
    const double estimate = qmc_estimate(f, map_points(pts, measures));
    const double err = estimate - reference;
    json doc{{"command", "integrate"},
             {"source", source},
             {"integrand", o.integrand},
             {"N", pts.size()},
             {"estimate", estimate},
             {"reference", reference},
             {"error", err},
             {"abs_error", std::fabs(err)}};
    if (w) {
        const double q = parse_q(o.q);
        BoundContext ctx{m, s, *w, support, q, {}};
        const double p = std::isinf(q) ? 1.0 : (q == 1.0 ? kInfinity : q / (q - 1.0));
        const double crit = thm1_bound(ctx, exact_E(pts, m, s, o.e_guard));
        const double norm = weighted_norm(f, *w, p);
        doc["thm1_bound"] = crit;
        doc["norm"] = norm;
        doc["error_bound"] = crit * norm;
    }
    emit(o, doc);
}

void run_bounds(const Options& o) {
    const double q = parse_q(o.q);
    json doc{{"command", "bounds"}, {"q", std::isinf(q) ? json("inf") : json(q)}};

    const bool have_source = source_count(o) > 0;
    std::optional<NetSource> src;
    std::size_t s = o.s;
    if (have_source) {
        src = net_source(o);
        s = src->dim();
        doc["source"] = src->describe();
    }
    if (o.weights.empty()) throw std::invalid_argument("bounds needs --weights");
    const std::size_t s_weights = std::max(s, o.s_max);
    if (s_weights < 1) throw std::invalid_argument("bounds needs a point source, --s or --s-max");
    const WeightScheme w = parse_weights_spec(o.weights, s_weights);
    const Cube cube = parse_cube_spec(o.cube, s_weights);

    if (src) {
        const int m = src->m();
        const DyadicPointSet pts = src->points();
        BoundContext ctx{m, s, w, cube, q, {}};
        const auto E = exact_E(pts, m, s, o.e_guard);
        json rows = json::array();
        for (const auto& [u, e] : E) {
            const int t = exact_t(src->net, u, o.t_guard);
            ctx.t_map[u] = t;
            rows.push_back({{"u", one_based(u)},
                            {"E", e.to_string()},
                            {"E_value", e.to_double()},
                            {"t", t},
                            {"lemma_E_bound", lemma_E_bound(t, m, subset_size(u))}});
        }
        doc["subsets"] = rows;
        doc["thm1_bound"] = thm1_bound(ctx, E);
        doc["net_bound"] = net_bound(ctx);
        if (src->rule) {
            doc["B"] = B_fast(pts, m, w, cube);
            if (q == 1.0) {
                doc["cbc_bound"] = cbc_bound(ctx);
                doc["avg_formula"] = avg_formula(ctx);
            }
        }
        if (o.n_points > 0) {
            // t_u of the sequence, taken as the worst t over the nets of size 2^1..2^m.
            if (src->rule) throw std::invalid_argument("--N needs a sequence source (--sobol or --matrices)");
            BoundContext seq_ctx = ctx;
            for (auto& [u, t] : seq_ctx.t_map) {
                for (int k = 1; k < m; ++k) {
                    NetDefinition sub;
                    sub.m = k;
                    for (const auto& c : src->net.matrices) sub.matrices.push_back(c.upper_left(k));
                    t = std::max(t, exact_t(sub, u, o.t_guard));
                }
            }
            doc["seq_bound"] = {{"N", o.n_points}, {"value", seq_bound(o.n_points, seq_ctx)}};
        }
    }

    if (!o.condition.empty()) {
        if (o.s_max < 1) throw std::invalid_argument("--condition needs --s-max");
        const ConditionReport rep = weight_condition_sums(parse_condition_kind(o.condition), w, cube, o.s_max);
        doc["weight_condition"] = {{"kind", o.condition},
                                   {"s_max", o.s_max},
                                   {"partial_sum", rep.partial_sums.back()},
                                   {"likely_divergent", rep.likely_divergent},
                                   {"terms", rep.terms},
                                   {"partial_sums", rep.partial_sums}};
    }
    if (o.sobol_c || o.condition == "nied") {
        json rows = json::array();
        for (Subset u : subsets_up_to(s, o.max_order)) {
            std::vector<std::size_t> coords;
            for (auto i : subset_members(u)) coords.push_back(i + 1);
            json row{{"u", one_based(u)}, {"nied_2_pow_t", tu_bound_nied(coords)}};
            if (o.sobol_c) row["sobol_t"] = tu_bound_sobol(coords, *o.sobol_c);
            rows.push_back(row);
        }
        doc["tu_bounds"] = rows;
    }
    if (!o.info.empty()) {
        std::vector<double> v;
        std::stringstream ss(o.info);
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
        if (v.size() != 3) throw std::invalid_argument("--info expects C,delta,eps");
        doc["info_complexity"] = {{"C", v[0]}, {"delta", v[1]}, {"eps", v[2]},
                                  {"N", info_complexity_bound(v[0], v[1], v[2])}};
    }
    emit(o, doc);
}

// ------------------------------------------------------------- config merging

std::string config_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); })) {
        std::string out;
        for (const auto& x : v) {
            if (!out.empty()) out += ',';
            out += x.is_string() ? x.get<std::string>() : x.dump();
        }
        return out;
    }
    return v.dump();
}

/// Appends "--key value" for every config entry whose flag is absent from argv.
/// Keys at the top level apply to the chosen subcommand; an object under the
/// subcommand's name is merged on top. "command" selects the subcommand when
/// none is given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args, const std::set<std::string>& commands) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const json cfg = read_json_file(path);
    if (!cfg.is_object()) throw wqmc::ParseError(0, path + ": config must be a JSON object");

    std::string command;
    for (const auto& a : args) {
        if (commands.count(a)) {
            command = a;
            break;
        }
    }
    if (command.empty() && cfg.contains("command")) {
        command = cfg.at("command").get<std::string>();
        if (!commands.count(command)) throw std::invalid_argument("unknown command '" + command + "' in config");
        args.push_back(command);
    }

    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.starts_with("--")) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                            : a.find('=') - 2));
    }

    json flat = json::object();
    for (const auto& [k, v] : cfg.items()) {
        if (k == "command" || commands.count(k)) continue;
        flat[k] = v;
    }
    if (!command.empty() && cfg.contains(command)) {
        for (const auto& [k, v] : cfg.at(command).items()) flat[k] = v;
    }
    for (const auto& [k, v] : flat.items()) {
        if (given.count(k) || k == "config") continue;
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back("--" + k);
            continue;
        }
        if (v.is_null()) continue;
        // Repeatable measure entries stay separate.
        if (k == "measure" && v.is_array() && !v.empty() && v.front().is_string()) {
            for (const auto& x : v) {
                args.push_back("--" + k);
                args.push_back(x.get<std::string>());
            }
            continue;
        }
        args.push_back("--" + k);
        args.push_back(config_value(v));
    }
    return args;
}

// ------------------------------------------------------------------ CLI setup

void add_source_options(CLI::App* sub, Options& o, bool with_cbc) {
    sub->add_flag("--plps", o.plps, "polynomial lattice point set from --f and --g");
    sub->add_flag("--sobol", o.sobol, "Sobol' net from the bundled direction numbers (--s, --m)");
    sub->add_option("--matrices", o.matrices, "generating-matrix file");
    sub->add_option("--f", o.f, "modulus as a hex bit mask, e.g. 0x7");
    sub->add_option("--g", o.g, "generating vector, e.g. 0x1,0x2");
    sub->add_option("--s", o.s, "dimension");
    sub->add_option("--m", o.m, "log2 of the number of points");
    sub->add_option("--shift", o.shift, "digital shift: one hex numerator per coordinate");
    if (with_cbc) sub->add_flag("--cbc", o.use_cbc, "construct the rule by CBC (--f, --weights)");
}

int exit_with(const char* category, const std::exception& e, int code) {
    std::cerr << "wqmc: " << category << ": " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Weighted quasi-Monte Carlo toolkit", "wqmc"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::Range(1, 1024));
    app.add_flag("--no-timestamp", o.no_timestamp, "omit generated_at from JSON output");
    app.add_option("--config", o.config, "JSON file with default option values (flags win)");
    app.add_option("--e-guard", o.e_guard, "maximum enumeration size for E values");
    app.add_option("--t-guard", o.t_guard, "maximum compositions per t level");
    app.add_option("--out", o.out, "output file (default stdout)");

    auto* cbc = app.add_subcommand("cbc", "construct a generating vector component by component");
    cbc->add_option("--f", o.f, "irreducible modulus as a hex bit mask")->required();
    cbc->add_option("--s", o.s, "dimension")->required();
    cbc->add_option("--weights", o.weights, "weight spec")->required();
    cbc->add_option("--cube", o.cube, "cube spec")->capture_default_str();

    auto* points = app.add_subcommand("points", "emit net, lattice or sequence-prefix points");
    add_source_options(points, o, false);
    points->add_option("--sequence", o.sequence, "emit the first N points of the digital sequence");
    points->add_option("--precision", o.precision, "sequence precision for --sobol --sequence")->capture_default_str()
        ->check(CLI::Range(1, 64));
    points->add_option("--format", o.format, "csv or binary")->capture_default_str();
    points->add_option("--decomposition", o.decomposition, "write the block decomposition of a prefix as JSON");

    auto* criterion = app.add_subcommand("criterion", "B_gamma of a polynomial lattice rule");
    criterion->add_option("--f", o.f, "modulus")->required();
    criterion->add_option("--g", o.g, "generating vector")->required();
    criterion->add_option("--weights", o.weights, "weight spec")->required();
    criterion->add_option("--cube", o.cube, "cube spec")->capture_default_str();
    criterion->add_flag("--dual", o.dual, "also evaluate from the dual net and list E per subset");
    criterion->add_option("--max-order", o.max_order, "only list subsets up to this size");

    auto* tvalue = app.add_subcommand("tvalue", "exact t_u table of a digital net");
    add_source_options(tvalue, o, false);
    tvalue->add_option("--max-order", o.max_order, "only subsets up to this size");
    tvalue->add_option("--sequence-profile", o.sequence_profile, "t of the k x k nets for k = 1..M");

    auto* integrate = app.add_subcommand("integrate", "QMC estimate against a product measure");
    add_source_options(integrate, o, true);
    integrate->add_option("--measure", o.measures, "measure spec, once or per coordinate")->required();
    integrate->add_option("--integrand", o.integrand, "constant, linear, product or smooth-exp")->capture_default_str();
    integrate->add_option("--value", o.value, "value of the constant integrand")->capture_default_str();
    integrate->add_option("--reference", o.reference, "reference integral (default: builtin value)");
    integrate->add_option("--weights", o.weights, "weight spec; enables the error bound");
    integrate->add_option("--q", o.q, "norm exponent q (1..inf)")->capture_default_str();

    auto* bounds = app.add_subcommand("bounds", "report worst-case error bounds");
    add_source_options(bounds, o, false);
    bounds->add_option("--weights", o.weights, "weight spec")->required();
    bounds->add_option("--cube", o.cube, "cube spec")->capture_default_str();
    bounds->add_option("--q", o.q, "q in [1, inf]")->capture_default_str();
    bounds->add_option("--N", o.n_points, "sequence length for the prefix bound");
    bounds->add_option("--condition", o.condition, "weight condition: nied, sobol or poly");
    bounds->add_option("--s-max", o.s_max, "number of terms in the weight condition");
    bounds->add_option("--sobol-c", o.sobol_c, "constant c of the Sobol' t_u bound");
    bounds->add_option("--info", o.info, "C,delta,eps for the information complexity bound");
    bounds->add_option("--max-order", o.max_order, "limit for the t_u bound table");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = merge_config(std::move(args), {"cbc", "points", "criterion", "tvalue", "integrate", "bounds"});
    } catch (const wqmc::ParseError& e) {
        return exit_with("config error", e, 2);
    } catch (const std::invalid_argument& e) {
        return exit_with("config error", e, 2);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_thread_count(o.threads);
        if (cbc->parsed()) run_cbc(o);
        if (points->parsed()) run_points(o);
        if (criterion->parsed()) run_criterion(o);
        if (tvalue->parsed()) run_tvalue(o);
        if (integrate->parsed()) run_integrate(o);
        if (bounds->parsed()) run_bounds(o);
    } catch (const WorkGuardError& e) {
        return exit_with("work guard", e, 3);
    } catch (const NumericValidationError& e) {
        return exit_with("numeric validation failed", e, 4);
    } catch (const wqmc::ParseError& e) {
        return exit_with("config error", e, 2);
    } catch (const std::invalid_argument& e) {
        return exit_with("config error", e, 2);
    } catch (const std::exception& e) {
        return exit_with("error", e, 1);
    }
    return 0;
}
