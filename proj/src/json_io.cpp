#include "awf/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace awf {

using nlohmann::json;

namespace {

std::vector<double> number_array(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number())
            throw std::invalid_argument(std::string(what) + " must contain numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

const json& require(const json& j, const char* key, const char* ctx) {
    const auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(ctx) + " is missing field \"" + key + "\"");
    return *it;
}

// Nested tabulated values: depth-d arrays flattened row-major (last axis
// fastest) against the expected per-axis sizes.
void flatten_table(const json& j, const std::vector<std::size_t>& sizes,
                   std::size_t depth, std::vector<double>& out) {
    if (depth == sizes.size()) {
        if (!j.is_number())
            throw std::invalid_argument("tabulated values must be numbers");
        out.push_back(j.get<double>());
        return;
    }
    if (!j.is_array() || j.size() != sizes[depth])
        throw std::invalid_argument("tabulated values do not match the axis grids");
    for (const auto& sub : j) flatten_table(sub, sizes, depth + 1, out);
}

json nest_table(const std::vector<double>& flat, const std::vector<std::size_t>& sizes,
                std::size_t depth, std::size_t& cursor) {
    if (depth == sizes.size()) return flat[cursor++];
    json arr = json::array();
    for (std::size_t i = 0; i < sizes[depth]; ++i)
        arr.push_back(nest_table(flat, sizes, depth + 1, cursor));
    return arr;
}

}  // namespace

json scalar_to_json(const ScalarPLF& f) {
    return json{{"knots", f.grid.knots}, {"values", f.values}};
}

ScalarPLF scalar_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("scalar function must be an object");
    return make_scalar(number_array(require(j, "knots", "scalar function"), "knots"),
                       number_array(require(j, "values", "scalar function"), "values"));
}

json additive_to_json(const AdditiveFn& f) {
    json comps = json::array();
    for (const auto& c : f.components) comps.push_back(scalar_to_json(c));
    return json{{"components", std::move(comps)}};
}

AdditiveFn additive_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("additive function must be an object");
    const json& comps = require(j, "components", "additive function");
    if (!comps.is_array())
        throw std::invalid_argument("\"components\" must be an array");
    std::vector<ScalarPLF> parts;
    parts.reserve(comps.size());
    for (const auto& c : comps) parts.push_back(scalar_from_json(c));
    return make_additive(std::move(parts));
}

json boundary_to_json(const Boundary& u) {
    switch (u.kind) {
        case Boundary::Kind::Constant:
            return json{{"kind", "constant"}, {"c", u.c}};
        case Boundary::Kind::SumSeparable: {
            json profiles = json::array();
            for (const auto& p : u.profiles) profiles.push_back(scalar_to_json(p));
            return json{{"kind", "sum_separable"}, {"c", u.c}, {"profiles", std::move(profiles)}};
        }
        case Boundary::Kind::Tabulated: {
            std::vector<std::size_t> sizes;
            for (const auto& g : u.grids) sizes.push_back(g.size());
            std::size_t cursor = 0;
            return json{{"kind", "tabulated"},
                        {"grids", u.grids},
                        {"values", nest_table(u.table, sizes, 0, cursor)}};
        }
    }
    throw std::logic_error("unreachable boundary kind");
}

Boundary boundary_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("boundary must be an object");
    const json& kind = require(j, "kind", "boundary");
    if (!kind.is_string()) throw std::invalid_argument("boundary \"kind\" must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "constant") {
        const json& c = require(j, "c", "constant boundary");
        if (!c.is_number()) throw std::invalid_argument("boundary \"c\" must be a number");
        return boundary_constant(c.get<double>());
    }
    if (k == "sum_separable") {
        const json& c = require(j, "c", "separable boundary");
        if (!c.is_number()) throw std::invalid_argument("boundary \"c\" must be a number");
        const json& profs = require(j, "profiles", "separable boundary");
        if (!profs.is_array())
            throw std::invalid_argument("boundary \"profiles\" must be an array");
        std::vector<ScalarPLF> profiles;
        profiles.reserve(profs.size());
        for (const auto& p : profs) profiles.push_back(scalar_from_json(p));
        return boundary_sum_separable(c.get<double>(), std::move(profiles));
    }
    if (k == "tabulated") {
        const json& grids = require(j, "grids", "tabulated boundary");
        if (!grids.is_array())
            throw std::invalid_argument("boundary \"grids\" must be an array");
        std::vector<std::vector<double>> gs;
        std::vector<std::size_t> sizes;
        for (const auto& g : grids) {
            gs.push_back(number_array(g, "axis grid"));
            sizes.push_back(gs.back().size());
        }
        std::vector<double> flat;
        flatten_table(require(j, "values", "tabulated boundary"), sizes, 0, flat);
        return boundary_tabulated(std::move(gs), std::move(flat));
    }
    throw std::invalid_argument("unknown boundary kind \"" + k + "\"");
}

json sim_config_to_json(const SimConfig& c) {
    return json{{"d", c.d},
                {"grid_resolution", c.grid_resolution},
                {"n_paths", c.n_paths},
                {"seed", c.seed},
                {"chunk_size", c.chunk_size}};
}

SimConfig sim_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("sim config must be an object");
    SimConfig c;
    const json& d = require(j, "d", "sim config");
    const json& res = require(j, "grid_resolution", "sim config");
    const json& n = require(j, "n_paths", "sim config");
    const json& seed = require(j, "seed", "sim config");
    if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0)
        throw std::invalid_argument("sim \"d\" must be a positive integer");
    if (!res.is_number() || !(res.get<double>() >= 2.0))
        throw std::invalid_argument("sim \"grid_resolution\" must be at least 2");
    if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0)
        throw std::invalid_argument("sim \"n_paths\" must be a positive integer");
    if (!seed.is_number_unsigned())
        throw std::invalid_argument("sim \"seed\" must be a non-negative integer");
    c.d = d.get<std::size_t>();
    c.grid_resolution = res.get<double>();
    c.n_paths = n.get<std::size_t>();
    c.seed = seed.get<std::uint64_t>();
    if (const auto it = j.find("chunk_size"); it != j.end()) {
        if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0)
            throw std::invalid_argument("sim \"chunk_size\" must be a positive integer");
        c.chunk_size = it->get<std::size_t>();
    }
    return c;
}

json mc_estimate_to_json(const MCEstimate& e) {
    return json{{"p_hat", e.p_hat},         {"stderr", e.stderr_value},
                {"n_paths", e.n_paths},     {"resolution", e.grid_resolution},
                {"seed", e.seed},           {"method", e.method}};
}

MCEstimate mc_estimate_from_json(const json& j) {
    MCEstimate e;
    e.p_hat = require(j, "p_hat", "estimate").get<double>();
    e.stderr_value = require(j, "stderr", "estimate").get<double>();
    e.n_paths = require(j, "n_paths", "estimate").get<std::size_t>();
    e.grid_resolution = require(j, "resolution", "estimate").get<double>();
    e.seed = require(j, "seed", "estimate").get<std::uint64_t>();
    e.method = require(j, "method", "estimate").get<std::string>();
    return e;
}

json cone_decomposition_to_json(const ConeDecomposition& d) {
    return json{{"majorant", additive_to_json(d.majorant)},
                {"polar", additive_to_json(d.polar)},
                {"norms", json{{"majorant", d.norm_majorant}, {"polar", d.norm_polar}}},
                {"orthogonality_residual", d.orthogonality_residual}};
}

json bounds_report_to_json(const BoundsReport& r) {
    return json{
        {"alpha", r.alpha},
        {"p0", json{{"value", r.p0_value}, {"stderr", r.p0_stderr}, {"source", r.p0_source}}},
        {"kuelbs_li_gap", r.kuelbs_li_gap_value},
        {"sandwich_lower", r.sandwich_lower},
        {"sandwich_upper", r.sandwich_upper},
        {"thm31_upper", r.thm31_upper},
        {"p_polar", json{{"value", r.p_polar_value},
                         {"stderr", r.p_polar_stderr},
                         {"source", r.p_polar_source}}},
        {"condition31_ok", r.condition31_ok},
        {"log_asymptote", r.log_asymptote_value},
        {"inputs", json{{"trend", additive_to_json(r.trend)},
                        {"boundary", boundary_to_json(r.boundary)},
                        {"gamma", r.gamma}}}};
}

Instance parse_instance_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Strip the library's bracketed prefix: diagnostics read
        // "parse error at line L, column C: ...".
        std::string msg = e.what();
        const auto pos = msg.find("parse error");
        throw std::invalid_argument(pos == std::string::npos ? msg : msg.substr(pos));
    }
    if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");

    Instance inst;
    inst.trend = additive_from_json(require(j, "trend", "instance"));
    inst.boundary = boundary_from_json(require(j, "boundary", "instance"));
    if (const auto bd = inst.boundary.dimension(); bd && *bd != inst.trend.dim())
        throw std::invalid_argument("trend and boundary dimensions differ");

    if (const auto it = j.find("gamma"); it != j.end()) {
        if (it->is_number()) {
            inst.gammas.push_back(it->get<double>());
        } else if (it->is_array()) {
            inst.gammas = number_array(*it, "gamma");
        } else {
            throw std::invalid_argument("\"gamma\" must be a number or an array");
        }
        for (double g : inst.gammas)
            if (!(g > 0.0)) throw std::invalid_argument("gamma values must be positive");
    }
    if (const auto it = j.find("sim"); it != j.end()) {
        inst.sim = sim_config_from_json(*it);
        if (inst.sim->d != inst.trend.dim())
            throw std::invalid_argument("sim \"d\" does not match the trend dimension");
    }
    return inst;
}

Instance parse_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str());
}

}  // namespace awf
