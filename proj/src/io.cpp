#include "valsketch/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "valsketch/error.hpp"

namespace valsketch::io {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!j.is_object()) throw InvalidInput(what + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) throw InvalidInput("unknown key '" + key + "' in " + what);
    }
}

double number(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) throw InvalidInput(what + " needs '" + key + "'");
    if (!j.at(key).is_number()) throw InvalidInput(what + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::string tag_of(const json& j, const char* tag, const std::string& what) {
    if (!j.is_object() || !j.contains(tag) || !j.at(tag).is_string()) {
        throw InvalidInput(what + " needs a string '" + tag + "'");
    }
    return j.at(tag).get<std::string>();
}

std::string variant_of(const json& j, const std::string& what) { return tag_of(j, "variant", what); }

ScalarConcave concave_from_json(const json& j) {
    const auto t = variant_of(j, "concave function");
    if (t == "sqrt") {
        check_keys(j, {"variant"}, "sqrt");
        return ScalarConcave::sqrt();
    }
    if (t == "power") {
        check_keys(j, {"variant", "exponent"}, "power");
        return ScalarConcave::power(number(j, "exponent", "power"));
    }
    if (t == "exp_saturation") {
        check_keys(j, {"variant", "rate"}, "exp_saturation");
        return ScalarConcave::exp_saturation(number(j, "rate", "exp_saturation"));
    }
    throw InvalidInput("unknown concave function type '" + t + "'");
}

json concave_to_json(const ScalarConcave& g) {
    switch (g.kind()) {
        case ScalarConcave::Kind::Sqrt: return {{"variant", "sqrt"}};
        case ScalarConcave::Kind::Power: return {{"variant", "power"}, {"exponent", g.param()}};
        case ScalarConcave::Kind::ExpSaturation: return {{"variant", "exp_saturation"}, {"rate", g.param()}};
    }
    return {};
}

std::vector<Atom> atoms_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("'atoms' must be an array of [value, prob] pairs");
    std::vector<Atom> atoms;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
            throw InvalidInput("each atom must be a [value, prob] pair of numbers");
        }
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return atoms;
}

}  // namespace

ScalarMap scalar_map_from_json(const json& j) {
    const auto t = variant_of(j, "transform");
    if (t == "power") {
        check_keys(j, {"variant", "exponent"}, "power transform");
        return ScalarMap::power(number(j, "exponent", "power transform"));
    }
    if (t == "exp_saturation") {
        check_keys(j, {"variant", "rate"}, "exp_saturation transform");
        return ScalarMap::exp_saturation(number(j, "rate", "exp_saturation transform"));
    }
    throw InvalidInput("unknown transform type '" + t + "'");
}

json scalar_map_to_json(const ScalarMap& m) {
    if (m.kind() == ScalarMap::Kind::Power) return {{"variant", "power"}, {"exponent", m.param()}};
    return {{"variant", "exp_saturation"}, {"rate", m.param()}};
}

FunctionProperties properties_from_json(const json& j) {
    check_keys(j,
               {"monotone", "subadditive", "submodular", "weak_hom_degree", "weak_hom_tolerance",
                "extendable_concave", "coordinate_wise_degree"},
               "properties");
    FunctionProperties p;
    p.monotone = j.value("monotone", true);
    p.subadditive = j.value("subadditive", false);
    p.submodular = j.value("submodular", false);
    p.weak_hom_degree = j.value("weak_hom_degree", 0.0);
    p.weak_hom_tolerance = j.value("weak_hom_tolerance", 1.0);
    p.extendable_concave = j.value("extendable_concave", false);
    if (j.contains("coordinate_wise_degree") && !j.at("coordinate_wise_degree").is_null()) {
        p.coordinate_wise_degree = j.at("coordinate_wise_degree").get<double>();
    }
    p.validate();
    return p;
}

json properties_to_json(const FunctionProperties& p) {
    json j = {{"monotone", p.monotone},
              {"subadditive", p.subadditive},
              {"submodular", p.submodular},
              {"weak_hom_degree", p.weak_hom_degree},
              {"weak_hom_tolerance", p.weak_hom_tolerance},
              {"extendable_concave", p.extendable_concave}};
    j["coordinate_wise_degree"] = p.coordinate_wise_degree ? json(*p.coordinate_wise_degree) : json(nullptr);
    return j;
}

ValuationSpec valuation_from_json(const json& j) {
    const auto t = variant_of(j, "valuation");
    if (t == "max") {
        check_keys(j, {"variant", "id"}, "max");
        return ValuationSpec::max();
    }
    if (t == "top_h") {
        check_keys(j, {"variant", "id", "h"}, "top_h");
        if (!j.contains("h") || !j.at("h").is_number_integer()) throw InvalidInput("top_h needs an integer 'h'");
        return ValuationSpec::top_h(j.at("h").get<int>());
    }
    if (t == "ces") {
        check_keys(j, {"variant", "id", "r"}, "ces");
        return ValuationSpec::ces(number(j, "r", "ces"));
    }
    if (t == "power_of_sum") {
        check_keys(j, {"variant", "id", "r"}, "power_of_sum");
        return ValuationSpec::power_of_sum(number(j, "r", "power_of_sum"));
    }
    if (t == "concave_of_sum") {
        check_keys(j, {"variant", "id", "g"}, "concave_of_sum");
        if (!j.contains("g")) throw InvalidInput("concave_of_sum needs 'g'");
        return ValuationSpec::concave_of_sum(concave_from_json(j.at("g")));
    }
    if (t == "success_probability") {
        check_keys(j, {"variant", "id"}, "success_probability");
        return ValuationSpec::success_probability();
    }
    if (t == "transformed") {
        check_keys(j, {"variant", "id", "base", "transforms", "properties"}, "transformed");
        if (!j.contains("base") || !j.contains("transforms") || !j.at("transforms").is_array()) {
            throw InvalidInput("transformed needs 'base' and a 'transforms' array");
        }
        std::vector<ScalarMap> maps;
        for (const auto& m : j.at("transforms")) maps.push_back(scalar_map_from_json(m));
        std::optional<FunctionProperties> declared;
        if (j.contains("properties")) declared = properties_from_json(j.at("properties"));
        return apply_transform(valuation_from_json(j.at("base")), std::move(maps), declared);
    }
    throw InvalidInput("unknown valuation type '" + t + "'");
}

json valuation_to_json(const ValuationSpec& spec) {
    struct Writer {
        const ValuationSpec& spec;
        json operator()(const valuation::Max&) const { return {{"variant", "max"}}; }
        json operator()(const valuation::TopH& t) const { return {{"variant", "top_h"}, {"h", t.h}}; }
        json operator()(const valuation::Ces& c) const { return {{"variant", "ces"}, {"r", c.r}}; }
        json operator()(const valuation::PowerOfSum& p) const { return {{"variant", "power_of_sum"}, {"r", p.r}}; }
        json operator()(const valuation::ConcaveOfSum& c) const {
            return {{"variant", "concave_of_sum"}, {"g", concave_to_json(c.g)}};
        }
        json operator()(const valuation::SuccessProbability&) const { return {{"variant", "success_probability"}}; }
        json operator()(const valuation::Transformed& t) const {
            json maps = json::array();
            for (const auto& m : t.transforms) maps.push_back(scalar_map_to_json(m));
            return {{"variant", "transformed"},
                    {"base", valuation_to_json(*t.base)},
                    {"transforms", maps},
                    {"properties", properties_to_json(spec.properties())}};
        }
    };
    return std::visit(Writer{spec}, spec.variant());
}

ItemDistribution distribution_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("distribution must be a JSON object");
    if (j.contains("summary")) return distribution_from_json(j.at("summary"));
    if (j.contains("atoms")) {
        return ItemDistribution::discrete(DiscreteDistribution(atoms_from_json(j.at("atoms"))));
    }
    if (j.contains("samples")) {
        if (!j.at("samples").is_array()) throw InvalidInput("'samples' must be an array of numbers");
        return from_samples(j.at("samples").get<std::vector<double>>());
    }
    const auto f = tag_of(j, "family", "distribution");
    if (f == "exponential") {
        check_keys(j, {"family", "item", "mean"}, "exponential");
        return ItemDistribution::exponential(number(j, "mean", "exponential"));
    }
    if (f == "pareto") {
        check_keys(j, {"family", "item", "shape", "scale"}, "pareto");
        return ItemDistribution::pareto(number(j, "shape", "pareto"), number(j, "scale", "pareto"));
    }
    if (f == "uniform") {
        check_keys(j, {"family", "item", "lo", "hi"}, "uniform");
        return ItemDistribution::uniform(number(j, "lo", "uniform"), number(j, "hi", "uniform"));
    }
    throw InvalidInput("unknown distribution family '" + f + "'");
}

json atoms_to_json(const DiscreteDistribution& d) {
    json atoms = json::array();
    for (const auto& a : d.atoms()) atoms.push_back({a.value, a.prob});
    return atoms;
}

json distribution_to_json(const ItemDistribution& d) {
    if (const auto* e = d.as<Exponential>()) return {{"family", "exponential"}, {"mean", e->mean}};
    if (const auto* p = d.as<Pareto>()) return {{"family", "pareto"}, {"shape", p->shape}, {"scale", p->scale}};
    if (const auto* u = d.as<Uniform>()) return {{"family", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
    if (const auto* e = d.as<Empirical>()) {
        return {{"samples", std::vector<double>(e->samples().begin(), e->samples().end())}};
    }
    return {{"atoms", atoms_to_json(*d.as<DiscreteDistribution>())}};
}

json sketch_to_json(const SketchResult& r, const SketchParams& params, ItemId item) {
    return {{"item", item},
            {"epsilon", params.epsilon},
            {"lower_cut", params.lower_cut},
            {"tau", r.tau},
            {"tail_mean", r.tail_mean},
            {"tail_atom", r.tail_atom},
            {"bin_count", r.bin_count},
            {"delta_at_tau", r.delta_at_tau},
            {"summary", {{"atoms", atoms_to_json(r.summary)}}}};
}

json estimate_to_json(const EvalEstimate& e) {
    json j = {{"value", e.value}, {"std_error", e.std_error}, {"method", to_string(e.method)}};
    if (e.method == EvalMethod::MonteCarlo) {
        j["samples"] = e.samples;
        j["seed"] = e.seed;
    }
    return j;
}

json bound_to_json(const BoundReport& b) {
    json j = {{"alpha", b.alpha}, {"beta", b.beta}, {"variant", to_string(b.variant)}};
    j["psi"] = b.psi ? json(*b.psi) : json(nullptr);
    return j;
}

DistributionCatalog load_catalog(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    DistributionCatalog catalog;
    for (const auto& f : files) {
        const json j = read_json_file(f);
        ItemId id = 0;
        if (j.is_object() && j.contains("item")) {
            id = j.at("item").get<ItemId>();
        } else {
            std::string stem = f.stem().string();
            if (stem.rfind("item_", 0) == 0) stem = stem.substr(5);
            auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
            if (ec != std::errc() || ptr != stem.data() + stem.size()) {
                throw InvalidInput("cannot infer an item id for " + f.string() + " (add an \"item\" field)");
            }
        }
        if (id < 1) throw InvalidInput("item ids must be >= 1 in " + f.string());
        if (catalog.count(id)) throw InvalidInput("item " + std::to_string(id) + " defined twice in " + dir.string());
        try {
            catalog.emplace(id, distribution_from_json(j));
        } catch (const InvalidInput& e) {
            throw InvalidInput(f.string() + ": " + e.what());
        }
    }
    if (catalog.empty()) throw InvalidInput("no .json item files in " + dir.string());
    return catalog;
}

DiscreteCatalog to_discrete_catalog(const DistributionCatalog& c) {
    DiscreteCatalog out;
    for (const auto& [id, d] : c) {
        if (!d.is_atomic()) {
            throw InvalidInput("item " + std::to_string(id) + " has a continuous law; exact methods need atoms");
        }
        out.emplace(id, to_discrete(d));
    }
    return out;
}

std::vector<double> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string field = split_csv_line(line).front();
        const auto first = field.find_first_not_of(" \t");
        const auto last = field.find_last_not_of(" \t");
        field = first == std::string::npos ? std::string() : field.substr(first, last - first + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            if (out.empty() && row == 1) continue;
            throw InvalidInput(path.string() + ":" + std::to_string(row) + ": non-numeric value '" + field + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw InvalidInput(path.string() + ": no values");
    return out;
}

json testscore_table_to_json(const TestScoreTable& t) {
    json scores = json::object();
    for (const auto& [id, v] : t.scores) scores[std::to_string(id)] = v;
    return {{"k", t.k}, {"n_samples", t.n_samples}, {"seed", t.seed}, {"scores", scores}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
    if (!out) throw InvalidInput("write failed for " + path.string());
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(std::move(field));
    return out;
}

}  // namespace valsketch::io
