#include "crm/config_io.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace crm {

using Json = nlohmann::ordered_json;

ParseError::ParseError(const std::string& source, int line, int column, const std::string& field,
                       const std::string& message)
    : InvalidConfig([&] {
          std::ostringstream os;
          os << source;
          if (line > 0) os << ':' << line << ':' << column;
          os << ": ";
          if (!field.empty()) os << field << ": ";
          os << message;
          return os.str();
      }()),
      line_(line),
      column_(column),
      field_(field) {}

namespace {

// ---------------------------------------------------------------- decoding

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& path,
                           const std::string& msg) const {
        const YAML::Mark m = n.Mark();
        const bool known = !m.is_null() && m.line >= 0;
        throw ParseError(source_, known ? m.line + 1 : 0, known ? m.column + 1 : 0, path, msg);
    }

    // Every key of `n` must be in `allowed`.
    void keys(const YAML::Node& n, const std::string& path,
              std::initializer_list<std::string_view> allowed) const {
        if (!n.IsMap()) fail(n, path, "expected a mapping");
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                std::string list;
                for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
                fail(kv.first, join(path, key), "unknown key (expected one of: " + list + ")");
            }
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }

    double number(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a number");
        const auto s = n.Scalar();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail(n, path, "expected a number, got '" + s + "'");
        }
        if (used != s.size()) fail(n, path, "expected a number, got '" + s + "'");
        if (!std::isfinite(v)) fail(n, path, "must be finite");
        return v;
    }

    std::size_t count(const YAML::Node& n, const std::string& path) const {
        const double v = number(n, path);
        if (v < 0 || v != std::floor(v) || v > 1e15) fail(n, path, "expected a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    std::string text(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a string");
        return n.Scalar();
    }

    bool flag(const YAML::Node& n, const std::string& path) const {
        const auto s = text(n, path);
        if (s == "true" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "no" || s == "off") return false;
        fail(n, path, "expected true or false");
    }

    std::vector<double> list(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence()) fail(n, path, "expected a list");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], index(path, i)));
        return out;
    }

    Vec vec(const YAML::Node& n, const std::string& path, std::size_t size) const {
        if (n.IsScalar()) return Vec::Constant(static_cast<Eigen::Index>(size), number(n, path));
        const auto v = list(n, path);
        if (v.size() != size)
            fail(n, path, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
        return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    // scalar | [rows] (broadcast along columns) | [[cols] x rows]
    Mat mat(const YAML::Node& n, const std::string& path, std::size_t rows, std::size_t cols) const {
        const auto R = static_cast<Eigen::Index>(rows), C = static_cast<Eigen::Index>(cols);
        if (n.IsScalar()) return Mat::Constant(R, C, number(n, path));
        if (!n.IsSequence()) fail(n, path, "expected a number or a list");
        if (n.size() != rows)
            fail(n, path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(n.size()));
        Mat m(R, C);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto& row = n[i];
            const auto p = index(path, i);
            if (row.IsScalar()) {
                m.row(static_cast<Eigen::Index>(i)).setConstant(number(row, p));
            } else {
                const auto v = list(row, p);
                if (v.size() != cols)
                    fail(row, p, "expected " + std::to_string(cols) + " entries, got " + std::to_string(v.size()));
                for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
            }
        }
        return m;
    }

    // scalar sets every off-diagonal pair; a matrix must be symmetric with zero diagonal.
    Mat pair_mat(const YAML::Node& n, const std::string& path, std::size_t M) const {
        Mat m = mat(n, path, M, M);
        if (n.IsScalar()) m.diagonal().setZero();
        return m;
    }

    ModelConfig model(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"scenario", "consumers", "resources", "a", "d", "k", "w", "D", "a_intra",
                       "d_intra", "a_inter", "d_inter"});
        auto need = [&](const char* key) {
            if (!n[key]) fail(n, join(path, key), "missing");
            return n[key];
        };
        Scenario sc{};
        try {
            sc = scenario_from_string(text(need("scenario"), join(path, "scenario")));
        } catch (const InvalidConfig& e) {
            fail(n["scenario"], join(path, "scenario"), e.what());
        }
        const auto res = need("resources");
        if (!res.IsSequence() || res.size() == 0)
            fail(res, join(path, "resources"), "expected a non-empty list");
        const std::size_t N = res.size();
        std::size_t M = 0;
        if (n["consumers"]) {
            M = count(n["consumers"], join(path, "consumers"));
        } else if (n["D"] && n["D"].IsSequence()) {
            M = n["D"].size();
        } else {
            fail(n, join(path, "consumers"), "missing (and D is not a list)");
        }
        if (M == 0) fail(n, join(path, "consumers"), "must be >= 1");

        ModelConfig c = ModelConfig::zeros(sc, M, N);
        for (std::size_t l = 0; l < N; ++l) {
            const auto p = index(join(path, "resources"), l);
            keys(res[l], p, {"kind", "rate", "K0"});
            auto& law = c.resources[l];
            if (!res[l]["kind"] || !res[l]["rate"] || !res[l]["K0"])
                fail(res[l], p, "needs kind, rate and K0");
            try {
                law.kind = resource_kind_from_string(text(res[l]["kind"], p + ".kind"));
            } catch (const InvalidConfig& e) {
                fail(res[l]["kind"], p + ".kind", e.what());
            }
            law.intrinsic_rate = number(res[l]["rate"], p + ".rate");
            law.carrying_capacity = number(res[l]["K0"], p + ".K0");
        }
        c.a = mat(need("a"), join(path, "a"), M, N);
        c.d = mat(need("d"), join(path, "d"), M, N);
        c.k = mat(need("k"), join(path, "k"), M, N);
        c.w = mat(need("w"), join(path, "w"), M, N);
        c.D = vec(need("D"), join(path, "D"), M);
        if (n["a_intra"]) c.a_intra = vec(n["a_intra"], join(path, "a_intra"), M);
        if (n["d_intra"]) c.d_intra = vec(n["d_intra"], join(path, "d_intra"), M);
        if (n["a_inter"]) c.a_inter = pair_mat(n["a_inter"], join(path, "a_inter"), M);
        if (n["d_inter"]) c.d_inter = pair_mat(n["d_inter"], join(path, "d_inter"), M);
        try {
            c.validate();
        } catch (const InvalidConfig& e) {
            fail(n, path, e.what());
        }
        return c;
    }

    RunControls run(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"t_end", "samples", "rel_tol", "abs_tol", "extinction_threshold", "window",
                       "seed", "runs", "threads"});
        RunControls r;
        if (n["t_end"]) r.t_end = number(n["t_end"], path + ".t_end");
        if (n["samples"]) r.samples = count(n["samples"], path + ".samples");
        if (n["rel_tol"]) r.rel_tol = number(n["rel_tol"], path + ".rel_tol");
        if (n["abs_tol"]) r.abs_tol = number(n["abs_tol"], path + ".abs_tol");
        if (n["extinction_threshold"])
            r.extinction_threshold = number(n["extinction_threshold"], path + ".extinction_threshold");
        if (n["window"]) r.window = number(n["window"], path + ".window");
        if (n["seed"]) r.seed = count(n["seed"], path + ".seed");
        if (n["runs"]) r.runs = count(n["runs"], path + ".runs");
        if (n["threads"]) r.threads = static_cast<unsigned>(count(n["threads"], path + ".threads"));
        return r;
    }

    HopfControls hopf(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"lo", "hi", "resolution", "points", "span", "settle_time"});
        HopfControls h;
        if (!n["lo"] || !n["hi"]) fail(n, path, "needs lo and hi");
        h.lo = number(n["lo"], path + ".lo");
        h.hi = number(n["hi"], path + ".hi");
        if (n["resolution"]) h.resolution = static_cast<int>(count(n["resolution"], path + ".resolution"));
        if (n["points"]) h.points = static_cast<int>(count(n["points"], path + ".points"));
        if (n["span"]) h.span = number(n["span"], path + ".span");
        if (n["settle_time"]) h.settle_time = number(n["settle_time"], path + ".settle_time");
        return h;
    }

    LyapunovControls lyapunov(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"t_total", "renorm_dt", "transient", "section_time"});
        LyapunovControls l;
        if (n["t_total"]) l.t_total = number(n["t_total"], path + ".t_total");
        if (n["renorm_dt"]) l.renorm_dt = number(n["renorm_dt"], path + ".renorm_dt");
        if (n["transient"]) l.transient = number(n["transient"], path + ".transient");
        if (n["section_time"]) l.section_time = number(n["section_time"], path + ".section_time");
        return l;
    }

    std::array<double, 2> range(const YAML::Node& n, const std::string& path) const {
        const auto v = list(n, path);
        if (v.size() != 2) fail(n, path, "expected [lo, hi]");
        return {v[0], v[1]};
    }

    SurfaceControls surface(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"family", "orders", "include_bd", "R", "C", "points", "quantity",
                       "own_abundance"});
        SurfaceControls s;
        if (n["family"]) s.family = text(n["family"], path + ".family");
        if (n["orders"]) {
            s.orders.clear();
            for (double o : list(n["orders"], path + ".orders")) s.orders.push_back(static_cast<int>(o));
        }
        if (n["include_bd"]) s.include_bd = flag(n["include_bd"], path + ".include_bd");
        if (n["R"]) s.r_range = range(n["R"], path + ".R");
        if (n["C"]) s.c_range = range(n["C"], path + ".C");
        if (n["points"]) s.points = count(n["points"], path + ".points");
        if (n["quantity"]) {
            const auto q = text(n["quantity"], path + ".quantity");
            if (q != "F" && q != "Xi") fail(n["quantity"], path + ".quantity", "expected F or Xi");
            s.searching_efficiency = q == "Xi";
        }
        if (n["own_abundance"]) s.own_abundance = number(n["own_abundance"], path + ".own_abundance");
        return s;
    }

    ScanControls scan(const YAML::Node& n, const std::string& path) const {
        keys(n, path, {"axes", "overlay_bound"});
        ScanControls s;
        const auto axes = n["axes"];
        if (!axes || !axes.IsSequence() || axes.size() != 2)
            fail(axes ? axes : n, path + ".axes", "expected exactly two axes");
        for (std::size_t i = 0; i < 2; ++i) {
            const auto p = index(path + ".axes", i);
            keys(axes[i], p, {"parameter", "lo", "hi", "points", "log"});
            if (!axes[i]["parameter"] || !axes[i]["lo"] || !axes[i]["hi"])
                fail(axes[i], p, "needs parameter, lo and hi");
            auto& ax = s.axes[i];
            ax.parameter = text(axes[i]["parameter"], p + ".parameter");
            ax.lo = number(axes[i]["lo"], p + ".lo");
            ax.hi = number(axes[i]["hi"], p + ".hi");
            if (axes[i]["points"]) ax.points = count(axes[i]["points"], p + ".points");
            if (axes[i]["log"]) ax.log = flag(axes[i]["log"], p + ".log");
        }
        if (n["overlay_bound"]) s.overlay_bound = flag(n["overlay_bound"], path + ".overlay_bound");
        return s;
    }

    IbmSetup ibm(const YAML::Node& n, const std::string& path, const ModelConfig& c) const {
        keys(n, path, {"L", "v_c", "v_r", "r_chase", "r_intra", "r_inter", "dt", "consumers",
                       "resources", "sample_dt"});
        if (c.consumers() != 2 || c.resource_count() != 1)
            fail(n, path, "the lattice model needs M = 2 and N = 1");
        IbmSetup s;
        auto& p = s.params;
        if (n["L"]) p.L = static_cast<int>(count(n["L"], path + ".L"));
        auto pair = [&](const char* key, std::array<double, 2>& dst) {
            if (!n[key]) return;
            const Vec v = vec(n[key], path + "." + key, 2);
            dst = {v(0), v(1)};
        };
        pair("v_c", p.v_c);
        pair("r_chase", p.r_chase);
        if (n["v_r"]) p.v_r = number(n["v_r"], path + ".v_r");
        if (n["r_intra"]) {
            const Vec v = vec(n["r_intra"], path + ".r_intra", 2);
            p.r_inter(0, 0) = v(0);
            p.r_inter(1, 1) = v(1);
        }
        if (n["r_inter"]) p.r_inter(0, 1) = p.r_inter(1, 0) = number(n["r_inter"], path + ".r_inter");
        for (int i = 0; i < 2; ++i) {
            p.d[i] = c.d(i, 0);
            p.k[i] = c.k(i, 0);
            p.w[i] = c.w(i, 0);
            p.D[i] = c.D(i);
            p.d_inter(i, i) = c.d_intra(i);
        }
        p.d_inter(0, 1) = p.d_inter(1, 0) = c.d_inter(0, 1);
        p.resource = c.resources[0];
        if (n["dt"]) {
            p.dt = number(n["dt"], path + ".dt");
        } else {
            p.choose_dt();
        }
        if (!n["consumers"] || !n["resources"]) fail(n, path, "needs consumers and resources counts");
        const Vec cn = vec(n["consumers"], path + ".consumers", 2);
        s.consumers = {static_cast<std::size_t>(cn(0)), static_cast<std::size_t>(cn(1))};
        s.resources = count(n["resources"], path + ".resources");
        if (n["sample_dt"]) s.sample_dt = number(n["sample_dt"], path + ".sample_dt");
        try {
            p.validate();
        } catch (const InvalidConfig& e) {
            fail(n, path, e.what());
        }
        return s;
    }

    ExperimentSpec spec(const YAML::Node& root) const {
        keys(root, "", {"name", "description", "engine", "model", "initial", "run", "hopf",
                        "lyapunov", "surface", "scan", "ibm", "output"});
        ExperimentSpec s;
        if (!root["name"]) fail(root, "name", "missing");
        s.name = text(root["name"], "name");
        if (root["description"]) s.description = text(root["description"], "description");
        if (!root["engine"]) fail(root, "engine", "missing");
        try {
            s.engine = engine_from_string(text(root["engine"], "engine"));
        } catch (const InvalidConfig& e) {
            fail(root["engine"], "engine", e.what());
        }
        if (!root["model"]) fail(root, "model", "missing");
        s.config = model(root["model"], "model");
        if (const auto init = root["initial"]) {
            keys(init, "initial", {"C", "R"});
            if (init["C"]) s.initial_C = vec(init["C"], "initial.C", s.config.consumers());
            if (init["R"]) s.initial_R = vec(init["R"], "initial.R", s.config.resource_count());
        }
        if (root["run"]) s.run = run(root["run"], "run");
        if (root["hopf"]) s.hopf = hopf(root["hopf"], "hopf");
        if (root["lyapunov"]) s.lyapunov = lyapunov(root["lyapunov"], "lyapunov");
        if (root["surface"]) s.surface = surface(root["surface"], "surface");
        if (root["scan"]) s.scan = scan(root["scan"], "scan");
        if (root["ibm"]) s.ibm = ibm(root["ibm"], "ibm", s.config);
        if (root["output"]) s.output_dir = text(root["output"], "output");
        try {
            validate(s);
        } catch (const ParseError&) {
            throw;
        } catch (const InvalidConfig& e) {
            fail(root, "", e.what());
        }
        return s;
    }

private:
    std::string source_;
};

YAML::Node json_to_yaml(const Json& j) {
    YAML::Node n;
    if (j.is_object()) {
        n = YAML::Node(YAML::NodeType::Map);
        for (auto it = j.begin(); it != j.end(); ++it) n[it.key()] = json_to_yaml(it.value());
    } else if (j.is_array()) {
        n = YAML::Node(YAML::NodeType::Sequence);
        for (const auto& e : j) n.push_back(json_to_yaml(e));
    } else if (j.is_string()) {
        n = j.get<std::string>();
    } else if (j.is_null()) {
        n = YAML::Node(YAML::NodeType::Null);
    } else {
        n = j.dump();  // numbers and booleans keep their exact text
    }
    return n;
}

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

YAML::Node load_tree(std::string_view text, const std::string& source) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
            std::string msg = e.what();
            if (auto p = msg.find("]: "); p != std::string::npos) msg = msg.substr(p + 3);
            throw ParseError(source, line, col, "", msg);
        }
        if (j.contains("manifest_version") && j.contains("spec")) return json_to_yaml(j["spec"]);
        return json_to_yaml(j);
    }
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(source, e.mark.line + 1, e.mark.column + 1, "", e.msg);
    }
}

// ---------------------------------------------------------------- encoding

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json mat_json(const Mat& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

Json model_json(const ModelConfig& c) {
    Json j;
    j["scenario"] = std::string(to_string(c.scenario));
    j["consumers"] = c.consumers();
    Json res = Json::array();
    for (const auto& r : c.resources)
        res.push_back({{"kind", std::string(to_string(r.kind))},
                       {"rate", r.intrinsic_rate},
                       {"K0", r.carrying_capacity}});
    j["resources"] = res;
    j["a"] = mat_json(c.a);
    j["d"] = mat_json(c.d);
    j["k"] = mat_json(c.k);
    j["w"] = mat_json(c.w);
    j["D"] = vec_json(c.D);
    if (has_intra(c.scenario)) {
        j["a_intra"] = vec_json(c.a_intra);
        j["d_intra"] = vec_json(c.d_intra);
    }
    if (has_inter(c.scenario)) {
        j["a_inter"] = mat_json(c.a_inter);
        j["d_inter"] = mat_json(c.d_inter);
    }
    return j;
}

Json spec_json(const ExperimentSpec& s) {
    Json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["engine"] = std::string(to_string(s.engine));
    j["model"] = model_json(s.config);
    if (s.initial_C.size() || s.initial_R.size()) {
        Json init;
        if (s.initial_C.size()) init["C"] = vec_json(s.initial_C);
        if (s.initial_R.size()) init["R"] = vec_json(s.initial_R);
        j["initial"] = init;
    }
    const auto& r = s.run;
    j["run"] = {{"t_end", r.t_end},         {"samples", r.samples},
                {"rel_tol", r.rel_tol},     {"abs_tol", r.abs_tol},
                {"extinction_threshold", r.extinction_threshold},
                {"window", r.window},       {"seed", r.seed},
                {"runs", r.runs},           {"threads", r.threads}};
    if (s.hopf) {
        const auto& h = *s.hopf;
        j["hopf"] = {{"lo", h.lo},         {"hi", h.hi},     {"resolution", h.resolution},
                     {"points", h.points}, {"span", h.span}, {"settle_time", h.settle_time}};
    }
    if (s.lyapunov) {
        const auto& l = *s.lyapunov;
        j["lyapunov"] = {{"t_total", l.t_total},
                         {"renorm_dt", l.renorm_dt},
                         {"transient", l.transient},
                         {"section_time", l.section_time}};
    }
    if (s.surface) {
        const auto& f = *s.surface;
        j["surface"] = {{"family", f.family},
                        {"orders", f.orders},
                        {"include_bd", f.include_bd},
                        {"R", {f.r_range[0], f.r_range[1]}},
                        {"C", {f.c_range[0], f.c_range[1]}},
                        {"points", f.points},
                        {"quantity", f.searching_efficiency ? "Xi" : "F"},
                        {"own_abundance", f.own_abundance}};
    }
    if (s.scan) {
        Json axes = Json::array();
        for (const auto& a : s.scan->axes)
            axes.push_back({{"parameter", a.parameter},
                            {"lo", a.lo},
                            {"hi", a.hi},
                            {"points", a.points},
                            {"log", a.log}});
        j["scan"] = {{"axes", axes}, {"overlay_bound", s.scan->overlay_bound}};
    }
    if (s.ibm) {
        const auto& b = *s.ibm;
        const auto& p = b.params;
        j["ibm"] = {{"L", p.L},
                    {"v_c", {p.v_c[0], p.v_c[1]}},
                    {"v_r", p.v_r},
                    {"r_chase", {p.r_chase[0], p.r_chase[1]}},
                    {"r_intra", {p.r_inter(0, 0), p.r_inter(1, 1)}},
                    {"r_inter", p.r_inter(0, 1)},
                    {"dt", p.dt},
                    {"consumers", {b.consumers[0], b.consumers[1]}},
                    {"resources", b.resources},
                    {"sample_dt", b.sample_dt}};
    }
    if (!s.output_dir.empty()) j["output"] = s.output_dir.string();
    return j;
}

void emit(YAML::Emitter& out, const Json& j) {
    if (j.is_object()) {
        out << YAML::BeginMap;
        for (auto it = j.begin(); it != j.end(); ++it) {
            out << YAML::Key << it.key() << YAML::Value;
            emit(out, it.value());
        }
        out << YAML::EndMap;
    } else if (j.is_array()) {
        const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_object(); });
        out << (flat ? YAML::Flow : YAML::Block) << YAML::BeginSeq;
        for (const auto& e : j) emit(out, e);
        out << YAML::EndSeq;
    } else if (j.is_string()) {
        out << j.get<std::string>();
    } else {
        out << j.dump();
    }
}

}  // namespace

ExperimentSpec parse_spec(std::string_view text, const std::string& source) {
    const YAML::Node root = load_tree(text, source);
    if (!root.IsMap()) throw ParseError(source, 1, 1, "", "top level must be a mapping");
    return Reader(source).spec(root);
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InvalidConfig("cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), file.string());
}

std::string spec_to_json(const ExperimentSpec& spec, int indent) {
    return spec_json(spec).dump(indent);
}

std::string spec_to_yaml(const ExperimentSpec& spec) {
    YAML::Emitter out;
    emit(out, spec_json(spec));
    return std::string(out.c_str()) + "\n";
}

ModelConfig parse_model_config(std::string_view text, const std::string& source) {
    const YAML::Node root = load_tree(text, source);
    return Reader(source).model(root, "");
}

std::string model_config_to_yaml(const ModelConfig& config) {
    YAML::Emitter out;
    emit(out, model_json(config));
    return std::string(out.c_str()) + "\n";
}

}  // namespace crm
