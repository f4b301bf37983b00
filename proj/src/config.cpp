#include "clrlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "clrlab/csv.hpp"

namespace clrlab {

namespace {

const std::set<std::string> kScheduleKeys = {"kind",  "lr",     "initial_lr", "factor",
                                             "milestones", "min_lr", "max_lr", "stepsize",
                                             "start_lr",   "end_lr"};

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = [] {
        std::map<std::string, std::set<std::string>> m;
        m["experiment"] = {"kind", "out_dir"};
        m["dataset"] = {"source", "n",      "noise",       "seed",        "test_fraction",
                        "centers", "std",   "images",      "labels",      "test_images",
                        "test_labels", "limit", "export"};
        m["arch"] = {"layers", "activation"};
        m["schedule"] = kScheduleKeys;
        m["train"] = {"total_iters", "batch_size", "momentum",      "weight_decay",
                      "seed",        "eval_every", "snapshot_iters"};
        m["baseline"] = kScheduleKeys;
        m["baseline"].insert("total_iters");
        m["probe"] = {"net1", "net2", "grid", "points", "barrier_tolerance", "jobs"};
        m["rangetest"] = {"window", "min_depth", "tolerance"};
        return m;
    }();
    return s;
}

std::string trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

[[noreturn]] void invalid(const std::string& key, const ConfigDocument::Entry& e,
                          const std::string& why) {
    throw ConfigParseError(ConfigIssue::Invalid, e.origin + ": " + key + ": " + why);
}

void check_known(const std::string& key, const std::string& origin) {
    const auto dot = key.find('.');
    const auto& s = schema();
    if (dot != std::string::npos) {
        auto it = s.find(key.substr(0, dot));
        if (it != s.end() && it->second.count(key.substr(dot + 1))) return;
    }
    throw ConfigParseError(ConfigIssue::UnknownKey, origin + ": unknown key '" + key + "'");
}

// Typed accessors over the document; each records which keys were consumed
// so inapplicable keys can be reported.
class Reader {
public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    const ConfigDocument::Entry* find(const std::string& key) {
        auto it = doc_.entries().find(key);
        if (it == doc_.entries().end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    std::optional<std::string> str(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return e->value;
    }

    template <class T>
    std::optional<T> integer(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return parse_integer<T>(key, *e, e->value);
    }

    std::optional<double> real(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        return parse_real(key, *e, e->value);
    }

    std::optional<bool> boolean(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no") return false;
        invalid(key, *e, "expected true or false, got '" + e->value + "'");
    }

    std::optional<std::vector<std::uint64_t>> u64_list(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        std::vector<std::uint64_t> out;
        if (trim(e->value).empty()) return out;
        for (const auto& tok : split(e->value, ',')) out.push_back(parse_integer<std::uint64_t>(key, *e, tok));
        return out;
    }

    std::optional<std::filesystem::path> path(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        if (e->value.empty()) invalid(key, *e, "empty path");
        std::filesystem::path p(e->value);
        if (p.is_relative() && e->from_file) p = doc_.base_dir() / p;
        return std::filesystem::absolute(p).lexically_normal();
    }

    std::optional<std::vector<std::vector<double>>> centers(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        std::vector<std::vector<double>> out;
        for (const auto& point : split(e->value, ';')) {
            std::vector<double> c;
            for (const auto& tok : split(point, ',')) c.push_back(parse_real(key, *e, tok));
            out.push_back(std::move(c));
        }
        return out;
    }

    /// Throws for the first present key in `section` that was never read.
    void reject_unused(const std::string& section, const std::string& context) {
        for (const auto& [key, e] : doc_.entries()) {
            if (key.rfind(section + ".", 0) == 0 && !used_.count(key)) {
                throw ConfigParseError(ConfigIssue::Invalid,
                                       e.origin + ": key '" + key + "' does not apply to " + context);
            }
        }
    }

    const ConfigDocument::Entry& entry(const std::string& key) {
        return doc_.entries().at(key);
    }

private:
    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream is(s);
        while (std::getline(is, cur, sep)) out.push_back(trim(cur));
        if (!s.empty() && s.back() == sep) out.emplace_back();
        return out;
    }

    template <class T>
    static T parse_integer(const std::string& key, const ConfigDocument::Entry& e, const std::string& raw) {
        const std::string tok = trim(raw);
        T value{};
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
            invalid(key, e, "expected a non-negative integer, got '" + tok + "'");
        }
        return value;
    }

    static double parse_real(const std::string& key, const ConfigDocument::Entry& e, const std::string& raw) {
        const std::string tok = trim(raw);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
            invalid(key, e, "expected a finite number, got '" + tok + "'");
        }
        return value;
    }

    const ConfigDocument& doc_;
    std::set<std::string> used_;
};

ScheduleSpec read_schedule(Reader& r, const std::string& section, std::uint64_t arm_iters) {
    const auto kind = r.str(section + ".kind");
    if (!kind) {
        throw ConfigParseError(ConfigIssue::Invalid, "missing required key '" + section + ".kind'");
    }
    auto need = [&](const std::string& k) {
        auto v = r.real(section + "." + k);
        if (!v) {
            throw ConfigParseError(ConfigIssue::Invalid, "missing required key '" + section + "." + k +
                                                             "' for schedule kind '" + *kind + "'");
        }
        return *v;
    };
    ScheduleSpec spec;
    if (*kind == "constant") {
        spec = ConstantLr{need("lr")};
    } else if (*kind == "step") {
        StepDecay s;
        s.initial_lr = need("initial_lr");
        s.factor = r.real(section + ".factor").value_or(0.1);
        s.milestones = r.u64_list(section + ".milestones").value_or(std::vector<std::uint64_t>{});
        spec = s;
    } else if (*kind == "triangular") {
        Triangular s;
        s.min_lr = need("min_lr");
        s.max_lr = need("max_lr");
        auto stepsize = r.integer<std::uint64_t>(section + ".stepsize");
        if (!stepsize) {
            throw ConfigParseError(ConfigIssue::Invalid,
                                   "missing required key '" + section + ".stepsize'");
        }
        s.stepsize = *stepsize;
        spec = s;
    } else if (*kind == "range") {
        spec = LinearRange{need("start_lr"), need("end_lr"), arm_iters};
    } else {
        invalid(section + ".kind", r.entry(section + ".kind"),
                "unknown schedule kind '" + *kind + "' (constant|step|triangular|range)");
    }
    try {
        validate(spec);
    } catch (const ConfigError& e) {
        throw ConfigParseError(ConfigIssue::Invalid, section + ": " + e.what());
    }
    return spec;
}

void write_schedule(std::ostream& os, const ScheduleSpec& spec) {
    os << "kind = " << schedule_kind(spec) << '\n';
    if (const auto* s = std::get_if<ConstantLr>(&spec)) {
        os << "lr = " << format_double(s->lr) << '\n';
    } else if (const auto* s = std::get_if<StepDecay>(&spec)) {
        os << "initial_lr = " << format_double(s->initial_lr) << '\n'
           << "factor = " << format_double(s->factor) << '\n'
           << "milestones = ";
        for (std::size_t i = 0; i < s->milestones.size(); ++i) os << (i ? "," : "") << s->milestones[i];
        os << '\n';
    } else if (const auto* s = std::get_if<Triangular>(&spec)) {
        os << "min_lr = " << format_double(s->min_lr) << '\n'
           << "max_lr = " << format_double(s->max_lr) << '\n'
           << "stepsize = " << s->stepsize << '\n';
    } else if (const auto* s = std::get_if<LinearRange>(&spec)) {
        os << "start_lr = " << format_double(s->start_lr) << '\n'
           << "end_lr = " << format_double(s->end_lr) << '\n';
    }
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source_name) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string origin = source_name + ":" + std::to_string(lineno);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigParseError(ConfigIssue::Syntax,
                                       "syntax error at " + origin + ": malformed section header '" + t + "'");
            }
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (!schema().count(section)) {
                throw ConfigParseError(ConfigIssue::UnknownKey,
                                       origin + ": unknown section '[" + section + "]'");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigParseError(ConfigIssue::Syntax,
                                   "syntax error at " + origin + ": expected 'key = value', got '" + t + "'");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) {
            throw ConfigParseError(ConfigIssue::Syntax, "syntax error at " + origin + ": empty key");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.has(full)) {
            throw ConfigParseError(ConfigIssue::Syntax,
                                   "syntax error at " + origin + ": duplicate key '" + full + "'");
        }
        doc.set(full, trim(std::string_view(t).substr(eq + 1)), origin);
        doc.entries_[full].from_file = true;
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigParseError(ConfigIssue::MissingFile, "missing config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    ConfigDocument doc = parse(ss.str(), path.string());
    doc.set_base_dir(std::filesystem::absolute(path).parent_path());
    return doc;
}

void ConfigDocument::set(const std::string& key, const std::string& value, const std::string& origin) {
    check_known(key, origin);
    entries_[key] = Entry{value, origin, false};
}

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Train: return "train";
        case ExperimentKind::RangeTest: return "range-test";
        case ExperimentKind::Interpolate: return "interpolate";
        case ExperimentKind::Compare: return "compare";
    }
    return "train";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (auto k : {ExperimentKind::Train, ExperimentKind::RangeTest, ExperimentKind::Interpolate,
                   ExperimentKind::Compare}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigParseError(ConfigIssue::Invalid, "unknown experiment kind '" + std::string(name) +
                                                     "' (train|range-test|interpolate|compare)");
}

TrainConfig ExperimentConfig::train_config() const {
    if (layers.empty()) throw ConfigError("experiment needs arch.layers");
    if (!schedule) throw ConfigError("experiment needs a [schedule] section");
    return TrainConfig{ArchitectureSpec(layers, activation),
                       *schedule,
                       total_iters,
                       batch_size,
                       momentum,
                       weight_decay,
                       seed,
                       eval_every,
                       snapshot_iters};
}

TrainConfig ExperimentConfig::baseline_config() const {
    if (!baseline_schedule) throw ConfigError("compare experiment needs a [baseline] section");
    TrainConfig c = train_config();
    c.schedule = *baseline_schedule;
    c.total_iters = baseline_total_iters;
    c.snapshot_iters.clear();
    return c;
}

std::vector<double> ExperimentConfig::alpha_grid() const {
    return probe.grid == "extended" ? extended_alpha_grid() : default_alpha_grid(probe.points);
}

ExperimentConfig resolve(const ConfigDocument& doc) {
    Reader r(doc);
    ExperimentConfig c;

    if (auto k = r.str("experiment.kind")) {
        c.kind = parse_experiment_kind(*k);
    } else {
        throw ConfigParseError(ConfigIssue::Invalid, "missing required key 'experiment.kind'");
    }
    if (auto p = r.path("experiment.out_dir")) c.out_dir = *p;
    else c.out_dir = std::filesystem::absolute(c.out_dir).lexically_normal();

    // Dataset.
    auto& d = c.dataset;
    if (auto s = r.str("dataset.source")) d.source = *s;
    d.export_csv = r.boolean("dataset.export").value_or(false);
    if (d.source == "moons" || d.source == "blobs") {
        d.n = r.integer<std::size_t>("dataset.n").value_or(d.n);
        d.seed = r.integer<std::uint64_t>("dataset.seed").value_or(d.seed);
        d.test_fraction = r.real("dataset.test_fraction").value_or(d.test_fraction);
        if (d.source == "moons") {
            d.noise = r.real("dataset.noise").value_or(d.noise);
        } else {
            d.stddev = r.real("dataset.std").value_or(d.stddev);
            auto centers = r.centers("dataset.centers");
            if (!centers) {
                throw ConfigParseError(ConfigIssue::Invalid, "blobs dataset needs dataset.centers");
            }
            d.centers = *centers;
        }
    } else if (d.source == "idx") {
        auto images = r.path("dataset.images");
        auto labels = r.path("dataset.labels");
        if (!images || !labels) {
            throw ConfigParseError(ConfigIssue::Invalid, "idx dataset needs dataset.images and dataset.labels");
        }
        d.images = images->string();
        d.labels = labels->string();
        auto ti = r.path("dataset.test_images");
        auto tl = r.path("dataset.test_labels");
        if (ti.has_value() != tl.has_value()) {
            throw ConfigParseError(ConfigIssue::Invalid,
                                   "dataset.test_images and dataset.test_labels must be given together");
        }
        if (ti) {
            d.test_images = ti->string();
            d.test_labels = tl->string();
        }
        d.limit = r.integer<std::size_t>("dataset.limit");
        d.seed = r.integer<std::uint64_t>("dataset.seed").value_or(d.seed);
        d.test_fraction = r.real("dataset.test_fraction").value_or(d.test_fraction);
    } else {
        invalid("dataset.source", r.entry("dataset.source"),
                "unknown dataset source '" + d.source + "' (moons|blobs|idx)");
    }
    if (!(d.test_fraction > 0.0 && d.test_fraction < 1.0)) {
        throw ConfigParseError(ConfigIssue::Invalid, "dataset.test_fraction must lie in (0, 1)");
    }
    r.reject_unused("dataset", "dataset source '" + d.source + "'");

    const bool trains = c.kind != ExperimentKind::Interpolate;
    if (trains) {
        auto layers = r.str("arch.layers");
        if (!layers) throw ConfigParseError(ConfigIssue::Invalid, "missing required key 'arch.layers'");
        try {
            c.layers = parse_layer_sizes(*layers);
            if (auto a = r.str("arch.activation")) c.activation = parse_activation(*a);
            ArchitectureSpec check(c.layers, c.activation);
        } catch (const ConfigParseError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ConfigParseError(ConfigIssue::Invalid, std::string("arch: ") + e.what());
        }

        c.total_iters = r.integer<std::uint64_t>("train.total_iters").value_or(c.total_iters);
        c.batch_size = r.integer<std::size_t>("train.batch_size").value_or(c.batch_size);
        c.momentum = r.real("train.momentum").value_or(c.momentum);
        c.weight_decay = r.real("train.weight_decay").value_or(c.weight_decay);
        c.seed = r.integer<std::uint64_t>("train.seed").value_or(c.seed);
        c.eval_every = r.integer<std::uint64_t>("train.eval_every").value_or(c.eval_every);
        c.snapshot_iters = r.u64_list("train.snapshot_iters")
                               .value_or(std::vector<std::uint64_t>{c.total_iters});
        c.schedule = read_schedule(r, "schedule", c.total_iters);
        r.reject_unused("schedule", "schedule kind '" + std::string(schedule_kind(*c.schedule)) + "'");

        if (c.kind == ExperimentKind::Compare) {
            auto iters = r.integer<std::uint64_t>("baseline.total_iters");
            if (!iters) {
                throw ConfigParseError(ConfigIssue::Invalid, "missing required key 'baseline.total_iters'");
            }
            c.baseline_total_iters = *iters;
            c.baseline_schedule = read_schedule(r, "baseline", c.baseline_total_iters);
            r.reject_unused("baseline", "baseline schedule kind '" +
                                            std::string(schedule_kind(*c.baseline_schedule)) + "'");
        }
        if (c.kind == ExperimentKind::RangeTest) {
            c.range.window = r.integer<std::size_t>("rangetest.window").value_or(c.range.window);
            c.range.min_depth = r.real("rangetest.min_depth").value_or(c.range.min_depth);
            c.range.plateau_tolerance = r.real("rangetest.tolerance").value_or(c.range.plateau_tolerance);
            if (c.range.window < 1) throw ConfigParseError(ConfigIssue::Invalid, "rangetest.window must be >= 1");
        }
        try {
            c.train_config().validate();
            if (c.kind == ExperimentKind::Compare) c.baseline_config().validate();
        } catch (const ConfigError& e) {
            throw ConfigParseError(ConfigIssue::Invalid, e.what());
        }
    } else {
        auto net1 = r.path("probe.net1");
        auto net2 = r.path("probe.net2");
        if (!net1 || !net2) {
            throw ConfigParseError(ConfigIssue::Invalid, "interpolate experiment needs probe.net1 and probe.net2");
        }
        for (const auto* p : {&*net1, &*net2}) {
            if (!std::filesystem::is_regular_file(*p)) {
                throw ConfigParseError(ConfigIssue::Invalid, "snapshot file '" + p->string() + "' does not exist");
            }
        }
        c.probe.net1 = net1->string();
        c.probe.net2 = net2->string();
        c.probe.grid = r.str("probe.grid").value_or(c.probe.grid);
        if (c.probe.grid != "default" && c.probe.grid != "extended") {
            invalid("probe.grid", r.entry("probe.grid"), "expected default or extended");
        }
        if (c.probe.grid == "default") c.probe.points = r.integer<std::size_t>("probe.points").value_or(c.probe.points);
        if (c.probe.points < 3) throw ConfigParseError(ConfigIssue::Invalid, "probe.points must be >= 3");
        c.probe.barrier_tolerance = r.real("probe.barrier_tolerance").value_or(c.probe.barrier_tolerance);
        c.probe.jobs = r.integer<std::size_t>("probe.jobs").value_or(c.probe.jobs);
        if (c.probe.jobs < 1) throw ConfigParseError(ConfigIssue::Invalid, "probe.jobs must be >= 1");
    }

    const std::string ctx = "experiment kind '" + std::string(to_string(c.kind)) + "'";
    for (const char* section : {"arch", "train", "schedule", "baseline", "probe", "rangetest"}) {
        r.reject_unused(section, ctx);
    }
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    return resolve(ConfigDocument::load(path));
}

std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[experiment]\n"
       << "kind = " << to_string(c.kind) << '\n'
       << "out_dir = " << c.out_dir.string() << "\n\n";

    const auto& d = c.dataset;
    os << "[dataset]\nsource = " << d.source << '\n';
    if (d.source == "idx") {
        os << "images = " << d.images << '\n' << "labels = " << d.labels << '\n';
        if (!d.test_images.empty()) {
            os << "test_images = " << d.test_images << '\n' << "test_labels = " << d.test_labels << '\n';
        }
        if (d.limit) os << "limit = " << *d.limit << '\n';
    } else {
        os << "n = " << d.n << '\n';
        if (d.source == "moons") {
            os << "noise = " << format_double(d.noise) << '\n';
        } else {
            os << "std = " << format_double(d.stddev) << '\n' << "centers = ";
            for (std::size_t i = 0; i < d.centers.size(); ++i) {
                if (i) os << ';';
                for (std::size_t j = 0; j < d.centers[i].size(); ++j) {
                    os << (j ? "," : "") << format_double(d.centers[i][j]);
                }
            }
            os << '\n';
        }
    }
    os << "seed = " << d.seed << '\n'
       << "test_fraction = " << format_double(d.test_fraction) << '\n'
       << "export = " << (d.export_csv ? "true" : "false") << "\n\n";

    if (c.kind != ExperimentKind::Interpolate) {
        os << "[arch]\nlayers = " << ArchitectureSpec(c.layers, c.activation).layers_string() << '\n'
           << "activation = " << to_string(c.activation) << "\n\n";
        os << "[train]\n"
           << "total_iters = " << c.total_iters << '\n'
           << "batch_size = " << c.batch_size << '\n'
           << "momentum = " << format_double(c.momentum) << '\n'
           << "weight_decay = " << format_double(c.weight_decay) << '\n'
           << "seed = " << c.seed << '\n'
           << "eval_every = " << c.eval_every << '\n'
           << "snapshot_iters = ";
        for (std::size_t i = 0; i < c.snapshot_iters.size(); ++i) os << (i ? "," : "") << c.snapshot_iters[i];
        os << "\n\n[schedule]\n";
        write_schedule(os, *c.schedule);
        if (c.kind == ExperimentKind::Compare) {
            os << "\n[baseline]\ntotal_iters = " << c.baseline_total_iters << '\n';
            write_schedule(os, *c.baseline_schedule);
        }
        if (c.kind == ExperimentKind::RangeTest) {
            os << "\n[rangetest]\n"
               << "window = " << c.range.window << '\n'
               << "min_depth = " << format_double(c.range.min_depth) << '\n'
               << "tolerance = " << format_double(c.range.plateau_tolerance) << '\n';
        }
    } else {
        os << "[probe]\n"
           << "net1 = " << c.probe.net1 << '\n'
           << "net2 = " << c.probe.net2 << '\n'
           << "grid = " << c.probe.grid << '\n';
        if (c.probe.grid == "default") os << "points = " << c.probe.points << '\n';
        os << "barrier_tolerance = " << format_double(c.probe.barrier_tolerance) << '\n'
           << "jobs = " << c.probe.jobs << '\n';
    }
    return os.str();
}

}  // namespace clrlab
