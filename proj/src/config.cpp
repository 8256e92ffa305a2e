#include "byrd/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace byrd {

const char* const kMetricsCsvHeader = "k,train_loss,test_loss,test_acc,grad_norm,agg_norm";

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool consumed = false;
};

struct RawConfig {
    std::string name;
    std::map<std::string, Entry> entries; // "section.key" -> value

    [[noreturn]] void fail(std::size_t line, const std::string& what) const {
        throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
    }

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    std::string* get(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.consumed = true;
        return &it->second.value;
    }

    std::string get_str(const std::string& key, const std::string& fallback) {
        const std::string* v = get(key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& key, double fallback) {
        const std::string* v = get(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double d = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            fail(entries.at(key).line, "expected a number for " + key);
        }
    }

    long get_long(const std::string& key, long fallback) {
        const std::string* v = get(key);
        if (!v) return fallback;
        long out = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || p != v->data() + v->size())
            fail(entries.at(key).line, "expected an integer for " + key);
        return out;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        const std::string* v = get(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || p != v->data() + v->size())
            fail(entries.at(key).line, "expected an unsigned integer for " + key);
        return out;
    }

    bool get_bool(const std::string& key, bool fallback) {
        const std::string* v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "off") return false;
        fail(entries.at(key).line, "expected true/false for " + key);
    }
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RawConfig tokenize(const std::string& text, const std::string& name) {
    RawConfig raw;
    raw.name = name;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') raw.fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) raw.fail(line_no, "empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) raw.fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) raw.fail(line_no, "empty key");
        if (section.empty()) raw.fail(line_no, "key outside any [section]");
        const std::string full = section + "." + key;
        if (raw.entries.count(full)) raw.fail(line_no, "duplicate key " + full);
        raw.entries[full] = Entry{value, line_no, false};
    }
    return raw;
}

AggregationRule::Kind parse_rule(const RawConfig& raw, const std::string& s,
                                 std::size_t line) {
    if (s == "mean") return AggregationRule::Kind::Mean;
    if (s == "cwmed") return AggregationRule::Kind::CwMed;
    if (s == "geomed") return AggregationRule::Kind::GeoMed;
    if (s == "krum") return AggregationRule::Kind::Krum;
    raw.fail(line, "unknown rule '" + s + "' (mean|cwmed|geomed|krum)");
}

AttackKind::Kind parse_attack(const RawConfig& raw, const std::string& s,
                              std::size_t line) {
    if (s == "none") return AttackKind::Kind::NoAttack;
    if (s == "random_noise") return AttackKind::Kind::RandomNoise;
    if (s == "sign_flip") return AttackKind::Kind::SignFlip;
    if (s == "zero_gradient") return AttackKind::Kind::ZeroGradient;
    raw.fail(line, "unknown attack '" + s +
                       "' (none|random_noise|sign_flip|zero_gradient)");
}

OptimizerKind parse_optimizer(const RawConfig& raw, const std::string& s,
                              std::size_t line) {
    if (s == "sgd") return OptimizerKind::Sgd;
    if (s == "nesterov") return OptimizerKind::Nesterov;
    raw.fail(line, "unknown optimizer '" + s + "' (sgd|nesterov)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

std::string resolve_path(const std::string& path, const std::string& root) {
    if (path.empty() || root.empty() || path.front() == '/') return path;
    return root + "/" + path;
}

double default_attack_mu(AttackKind::Kind k) {
    switch (k) {
    case AttackKind::Kind::RandomNoise:
        return 300.0;
    case AttackKind::Kind::SignFlip:
        return -10.0;
    default:
        return 0.0;
    }
}

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
    char buf[40];
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace

const char* optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::Sgd ? "sgd" : "nesterov";
}

ConfigFile parse_config_text(const std::string& text, const std::string& name,
                             const std::string& data_root) {
    RawConfig raw = tokenize(text, name);
    ConfigFile cf;
    RunConfig& cfg = cf.run;

    // [dataset]
    {
        const std::string kind = raw.get_str("dataset.kind", "synth_binary");
        DatasetSpec& ds = cfg.dataset;
        if (kind == "covtype") ds.kind = DatasetSpec::Kind::Covtype;
        else if (kind == "mnist") ds.kind = DatasetSpec::Kind::Mnist;
        else if (kind == "synth_binary") ds.kind = DatasetSpec::Kind::SynthBinary;
        else if (kind == "synth_class10") ds.kind = DatasetSpec::Kind::SynthClass10;
        else raw.fail(raw.entries.at("dataset.kind").line,
                      "unknown dataset kind '" + kind + "'");
        ds.path = resolve_path(raw.get_str("dataset.path", ""), data_root);
        ds.train_images = resolve_path(raw.get_str("dataset.train_images", ""), data_root);
        ds.train_labels = resolve_path(raw.get_str("dataset.train_labels", ""), data_root);
        ds.test_images = resolve_path(raw.get_str("dataset.test_images", ""), data_root);
        ds.test_labels = resolve_path(raw.get_str("dataset.test_labels", ""), data_root);
        ds.split_fraction = raw.get_double("dataset.split_fraction", 0.8);
        ds.minmax_scale = raw.get_bool("dataset.minmax_scale", false);
        ds.synth_n = static_cast<int>(raw.get_long("dataset.synth_n", 1000));
        ds.synth_dim = static_cast<int>(raw.get_long("dataset.synth_dim", 20));
        ds.limit_train = raw.get_long("dataset.limit_train", 0);
        if (ds.kind == DatasetSpec::Kind::Covtype && ds.path.empty())
            throw ConfigError(name + ": covtype dataset needs dataset.path");
        if (ds.kind == DatasetSpec::Kind::Mnist &&
            (ds.train_images.empty() || ds.train_labels.empty() ||
             ds.test_images.empty() || ds.test_labels.empty()))
            throw ConfigError(name + ": mnist dataset needs train/test image and "
                                     "label paths");
    }

    // [model] with per-dataset defaults
    {
        std::string def_kind;
        int def_features = 54, def_in = 784;
        switch (cfg.dataset.kind) {
        case DatasetSpec::Kind::Covtype:
            def_kind = "logistic";
            def_features = 54;
            break;
        case DatasetSpec::Kind::Mnist:
            def_kind = "mlp";
            def_in = 784;
            break;
        case DatasetSpec::Kind::SynthBinary:
            def_kind = "logistic";
            def_features = cfg.dataset.synth_dim;
            break;
        case DatasetSpec::Kind::SynthClass10:
            def_kind = "mlp";
            def_in = cfg.dataset.synth_dim;
            break;
        }
        const std::string kind = raw.get_str("model.kind", def_kind);
        if (kind == "logistic") {
            cfg.model = ModelShape::logistic(
                static_cast<int>(raw.get_long("model.features", def_features)));
        } else if (kind == "mlp") {
            cfg.model = ModelShape::mlp(
                static_cast<int>(raw.get_long("model.in", def_in)),
                static_cast<int>(raw.get_long("model.hidden", 32)),
                static_cast<int>(raw.get_long("model.out", 10)));
        } else {
            raw.fail(raw.entries.at("model.kind").line,
                     "unknown model kind '" + kind + "' (logistic|mlp)");
        }
    }

    // [run]
    cfg.n_workers = static_cast<int>(raw.get_long("run.workers", 100));
    cfg.byz_ratio = raw.get_double("run.byz_ratio", 0.0);
    cfg.iterations = raw.get_long("run.iterations", 1);
    cfg.eta = raw.get_double("run.eta", 0.005);
    cfg.beta = raw.get_double("run.beta", 0.9);
    cfg.batch_size = static_cast<int>(raw.get_long("run.batch_size", 64));
    cfg.seed = raw.get_u64("run.seed", 1);
    cfg.eval_every = raw.get_long("run.eval_every", 50);
    cfg.rho = raw.get_double("run.rho", 0.01);
    cfg.train_probe = raw.get_long("run.train_probe", 10000);
    cfg.threads = static_cast<int>(raw.get_long("run.threads", 0));
    {
        const std::string rule = raw.get_str("run.rule", "mean");
        cfg.rule.kind = parse_rule(raw, rule,
                                   raw.has("run.rule") ? raw.entries.at("run.rule").line : 0);
        cfg.rule.geomed_tol = raw.get_double("run.geomed_tol", 1e-6);
        cfg.rule.geomed_max_iter =
            static_cast<int>(raw.get_long("run.geomed_max_iter", 100));
    }
    {
        const std::string attack = raw.get_str("run.attack", "none");
        cfg.attack.kind = parse_attack(
            raw, attack, raw.has("run.attack") ? raw.entries.at("run.attack").line : 0);
        cfg.attack.mu = raw.get_double("run.attack_mu", default_attack_mu(cfg.attack.kind));
    }
    {
        const std::string opt = raw.get_str("run.optimizer", "nesterov");
        cfg.optimizer = parse_optimizer(
            raw, opt, raw.has("run.optimizer") ? raw.entries.at("run.optimizer").line : 0);
    }
    // The server sizes Krum's f from the configured Byzantine ratio.
    cfg.rule.krum_f = cfg.assumed_byz();

    // [grid]
    if (const std::string* v = raw.get("grid.rules"))
        for (const std::string& tok : split_list(*v))
            cf.grid.rules.push_back(parse_rule(raw, tok, raw.entries.at("grid.rules").line));
    if (const std::string* v = raw.get("grid.attacks"))
        for (const std::string& tok : split_list(*v))
            cf.grid.attacks.push_back(
                parse_attack(raw, tok, raw.entries.at("grid.attacks").line));
    if (const std::string* v = raw.get("grid.byz_ratios"))
        for (const std::string& tok : split_list(*v)) {
            try {
                cf.grid.byz_ratios.push_back(std::stod(tok));
            } catch (...) {
                raw.fail(raw.entries.at("grid.byz_ratios").line,
                         "expected numbers in grid.byz_ratios");
            }
        }
    if (const std::string* v = raw.get("grid.optimizers"))
        for (const std::string& tok : split_list(*v))
            cf.grid.optimizers.push_back(
                parse_optimizer(raw, tok, raw.entries.at("grid.optimizers").line));

    for (const auto& [key, entry] : raw.entries)
        if (!entry.consumed) raw.fail(entry.line, "unknown key " + key);

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
    return cf;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const char* root = std::getenv("BYRD_DATA_DIR");
    return parse_config_text(ss.str(), path, root ? root : "");
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[run]\n";
    os << "workers = " << cfg.n_workers << "\n";
    os << "byz_ratio = " << fmt_double(cfg.byz_ratio) << "\n";
    os << "iterations = " << cfg.iterations << "\n";
    os << "eta = " << fmt_double(cfg.eta) << "\n";
    os << "beta = " << fmt_double(cfg.beta) << "\n";
    os << "batch_size = " << cfg.batch_size << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "rule = " << rule_name(cfg.rule.kind) << "\n";
    os << "geomed_tol = " << fmt_double(cfg.rule.geomed_tol) << "\n";
    os << "geomed_max_iter = " << cfg.rule.geomed_max_iter << "\n";
    os << "attack = " << attack_name(cfg.attack.kind) << "\n";
    os << "attack_mu = " << fmt_double(cfg.attack.mu) << "\n";
    os << "optimizer = " << optimizer_name(cfg.optimizer) << "\n";
    os << "eval_every = " << cfg.eval_every << "\n";
    os << "rho = " << fmt_double(cfg.rho) << "\n";
    os << "train_probe = " << cfg.train_probe << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "\n[dataset]\n";
    const DatasetSpec& ds = cfg.dataset;
    switch (ds.kind) {
    case DatasetSpec::Kind::Covtype:
        os << "kind = covtype\n";
        break;
    case DatasetSpec::Kind::Mnist:
        os << "kind = mnist\n";
        break;
    case DatasetSpec::Kind::SynthBinary:
        os << "kind = synth_binary\n";
        break;
    case DatasetSpec::Kind::SynthClass10:
        os << "kind = synth_class10\n";
        break;
    }
    if (!ds.path.empty()) os << "path = " << ds.path << "\n";
    if (!ds.train_images.empty()) os << "train_images = " << ds.train_images << "\n";
    if (!ds.train_labels.empty()) os << "train_labels = " << ds.train_labels << "\n";
    if (!ds.test_images.empty()) os << "test_images = " << ds.test_images << "\n";
    if (!ds.test_labels.empty()) os << "test_labels = " << ds.test_labels << "\n";
    os << "split_fraction = " << fmt_double(ds.split_fraction) << "\n";
    os << "minmax_scale = " << (ds.minmax_scale ? "true" : "false") << "\n";
    os << "synth_n = " << ds.synth_n << "\n";
    os << "synth_dim = " << ds.synth_dim << "\n";
    os << "limit_train = " << ds.limit_train << "\n";
    os << "\n[model]\n";
    if (cfg.model.kind == ModelShape::Kind::Logistic) {
        os << "kind = logistic\n";
        os << "features = " << cfg.model.features << "\n";
    } else {
        os << "kind = mlp\n";
        os << "in = " << cfg.model.in << "\n";
        os << "hidden = " << cfg.model.hidden << "\n";
        os << "out = " << cfg.model.out << "\n";
    }
    return os.str();
}

std::vector<RunConfig> expand_grid(const RunConfig& base, const GridSpec& grid) {
    GridSpec g = grid;
    if (g.rules.empty()) g.rules = {base.rule.kind};
    if (g.attacks.empty()) g.attacks = {base.attack.kind};
    if (g.byz_ratios.empty()) g.byz_ratios = {base.byz_ratio};
    if (g.optimizers.empty()) g.optimizers = {base.optimizer};

    std::vector<RunConfig> cells;
    for (const auto rule : g.rules)
        for (const auto attack : g.attacks)
            for (const double eps : g.byz_ratios)
                for (const auto opt : g.optimizers) {
                    RunConfig c = base;
                    c.rule.kind = rule;
                    c.attack.kind = attack;
                    c.attack.mu = default_attack_mu(attack);
                    c.byz_ratio = eps;
                    c.optimizer = opt;
                    c.rule.krum_f = c.assumed_byz();
                    c.validate();
                    cells.push_back(std::move(c));
                }
    return cells;
}

std::string cell_name(const RunConfig& cfg) {
    char eps[24];
    std::snprintf(eps, sizeof(eps), "%g", cfg.byz_ratio);
    std::string s = std::string(rule_name(cfg.rule.kind)) + "_" +
                    attack_name(cfg.attack.kind) + "_eps" + eps + "_" +
                    optimizer_name(cfg.optimizer);
    return s;
}

std::string metrics_csv_text(const std::vector<RoundReport>& reports) {
    std::ostringstream os;
    os << kMetricsCsvHeader << "\n";
    char buf[160];
    for (const RoundReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%ld,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.k,
                      r.train_loss, r.test_loss, r.test_acc, r.grad_norm, r.agg_norm);
        os << buf;
    }
    return os.str();
}

void write_metrics_csv(const std::string& path, const std::vector<RoundReport>& reports) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << metrics_csv_text(reports);
}

std::vector<RoundReport> parse_metrics_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || trim(line) != kMetricsCsvHeader)
        throw std::runtime_error(path + ": unexpected metrics header");
    std::vector<RoundReport> out;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        RoundReport r;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf", &r.k, &r.train_loss,
                        &r.test_loss, &r.test_acc, &r.grad_norm, &r.agg_norm) != 6)
            throw std::runtime_error(path + ": malformed row: " + line);
        out.push_back(r);
    }
    return out;
}

void write_summary(const std::string& path, const RunSummary& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << kVersion << "\n";
    f << "status = " << (s.error.empty() ? "ok" : "error: " + s.error) << "\n";
    f << "best_acc = " << fmt_double(s.best_acc) << "\n";
    f << "final_acc = " << fmt_double(s.final_acc) << "\n";
    f << "final_loss = " << fmt_double(s.final_loss) << "\n";
    f << "beta_used = "
      << fmt_double(s.config_echo.optimizer == OptimizerKind::Sgd
                        ? 0.0
                        : s.config_echo.beta)
      << "\n";
    f << "wall_time_sec = " << fmt_double(s.wall_time_sec) << "\n";
    f << "rng_streams = worker n: seed^n; attack: seed^0xA11ACE; data: seed^0x5EED "
         "(synth), +1 split, +2 partition, +3 init\n";
    f << "\n# config\n" << serialize_config(s.config_echo);
}

} // namespace byrd
