#include "twr/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "twr/errors.hpp"

namespace twr {

void SweepSpec::validate() const
{
    if (!(dt53_min.count() > 0) || !(dt53_max > dt53_min)) {
        throw ConfigError("sweep bounds must satisfy 0 < dt53_min < dt53_max");
    }
    if (points == 0) {
        throw ConfigError("sweep points must be at least 1");
    }
}

void RunConfig::validate() const
{
    trial.validate();
    if (sweep) {
        sweep->validate();
    }
}

RunConfig default_run_config()
{
    using namespace literals;
    RunConfig cfg;
    cfg.trial.scene = Scene{Seconds(1.5L / kSpeedOfLight), 0.0};
    cfg.trial.clock_i = ClockParams{Seconds{}, 10e-6};
    cfg.trial.clock_j = ClockParams{Seconds{}, -10e-6};
    cfg.trial.noise = NoiseModel{SquaredSeconds{kDefaultTimestampVariance},
                                 NoiseDistribution::Gaussian, std::nullopt};
    cfg.trial.timing = TimingConfig{0.35_ms, 1.9_ms, 7.2_ms};
    cfg.trial.n_measurements = 2500;
    cfg.trial.seed = 42;
    cfg.sweep = SweepSpec{0.2_ms, 20.0_ms, 200, true};
    return cfg;
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

class FieldError {
public:
    FieldError(const std::string& source, int line, const std::string& field)
        : prefix_(source + ":" + std::to_string(line) + ": " + field + ": ")
    {
    }
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(prefix_ + what); }

private:
    std::string prefix_;
};

time_rep parse_real(const std::string& text, const FieldError& where)
{
    errno = 0;
    char* end = nullptr;
    const time_rep v = parse_time(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        where.fail("expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& text, const FieldError& where)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        where.fail("expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text, const FieldError& where)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    where.fail("expected true or false, got '" + text + "'");
}

Seconds parse_seconds(const std::string& text, const FieldError& where)
{
    const time_rep v = parse_real(text, where);
    try {
        return Seconds(v);
    } catch (const ConfigError& e) {
        where.fail(e.what());
    }
}

NoiseDistribution parse_distribution(const std::string& text, const FieldError& where)
{
    if (text == "gaussian") return NoiseDistribution::Gaussian;
    if (text == "uniform") return NoiseDistribution::Uniform;
    if (text == "none") return NoiseDistribution::None;
    where.fail("expected gaussian, uniform or none, got '" + text + "'");
}

const char* distribution_name(NoiseDistribution d)
{
    switch (d) {
    case NoiseDistribution::Gaussian: return "gaussian";
    case NoiseDistribution::Uniform: return "uniform";
    case NoiseDistribution::None: return "none";
    }
    return "gaussian";
}

std::string fmt_seconds(Seconds s)
{
    return format_time(s.count());
}

std::string fmt_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, const FieldError&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"scene.tof", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.scene.tof_initial = parse_seconds(v, w);
         }},
        {"scene.vbar", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.scene.vbar = static_cast<double>(parse_real(v, w));
         }},
        {"clock_i.offset", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.clock_i.offset = parse_seconds(v, w);
         }},
        {"clock_i.skew", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.clock_i.skew = static_cast<double>(parse_real(v, w));
         }},
        {"clock_j.offset", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.clock_j.offset = parse_seconds(v, w);
         }},
        {"clock_j.skew", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.clock_j.skew = static_cast<double>(parse_real(v, w));
         }},
        {"noise.variance", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.noise.variance = SquaredSeconds{static_cast<double>(parse_real(v, w))};
         }},
        {"noise.distribution", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.noise.distribution = parse_distribution(v, w);
         }},
        {"noise.quantization_tick", [](RunConfig& c, const std::string& v, const FieldError& w) {
             // 0 or empty disables rounding
             if (v.empty()) {
                 c.trial.noise.quantization_tick.reset();
                 return;
             }
             const Seconds tick = parse_seconds(v, w);
             if (tick.count() == 0) {
                 c.trial.noise.quantization_tick.reset();
             } else {
                 c.trial.noise.quantization_tick = tick;
             }
         }},
        {"timing.dt32", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.timing.dt32 = parse_seconds(v, w);
         }},
        {"timing.dt53", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.timing.dt53 = parse_seconds(v, w);
         }},
        {"timing.processing_T", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.timing.processing_T = parse_seconds(v, w);
         }},
        {"sweep.dt53_min", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.sweep.value().dt53_min = parse_seconds(v, w);
         }},
        {"sweep.dt53_max", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.sweep.value().dt53_max = parse_seconds(v, w);
         }},
        {"sweep.points", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.sweep.value().points = parse_count(v, w);
         }},
        {"sweep.log_spaced", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.sweep.value().log_spaced = parse_bool(v, w);
         }},
        {"run.n_measurements", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.n_measurements = parse_count(v, w);
         }},
        {"run.seed", [](RunConfig& c, const std::string& v, const FieldError& w) {
             c.trial.seed = parse_count(v, w);
         }},
        {"run.output_path", [](RunConfig& c, const std::string& v, const FieldError&) {
             c.output_path = v;
         }},
        {"run.timestamp_log", [](RunConfig& c, const std::string& v, const FieldError&) {
             c.timestamp_log = v;
         }},
    };
    return table;
}

// Runs a type-level validator and re-raises with the location of the section.
void check_section(const std::function<void()>& validator, const std::string& source, int line,
                   const std::string& section)
{
    try {
        validator();
    } catch (const ConfigError& e) {
        FieldError(source, line, section).fail(e.what());
    }
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& source)
{
    RunConfig cfg = default_run_config();
    cfg.sweep.reset();  // only present when the file has a [sweep] section

    std::map<std::string, int> section_line;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        const std::string line = trim(std::string_view(raw).substr(0, comment));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                FieldError(source, line_no, "section").fail("unterminated section header");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const char* known[] = {"scene", "clock_i", "clock_j", "noise",
                                          "timing", "sweep", "run"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                FieldError(source, line_no, section).fail("unknown section");
            }
            section_line.emplace(section, line_no);
            if (section == "sweep" && !cfg.sweep) {
                cfg.sweep = default_run_config().sweep;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            FieldError(source, line_no, section.empty() ? "?" : section)
                .fail("expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const std::string field = section + "." + key;
        if (section.empty()) {
            FieldError(source, line_no, key).fail("key outside of any section");
        }
        const auto it = setters().find(field);
        if (it == setters().end()) {
            FieldError(source, line_no, field).fail("unknown key");
        }
        it->second(cfg, value, FieldError(source, line_no, field));
    }

    auto line_of = [&](const std::string& s) {
        const auto it = section_line.find(s);
        return it == section_line.end() ? 0 : it->second;
    };
    check_section([&] { cfg.trial.scene.validate(); }, source, line_of("scene"), "scene");
    check_section([&] { cfg.trial.clock_i.validate(); }, source, line_of("clock_i"), "clock_i");
    check_section([&] { cfg.trial.clock_j.validate(); }, source, line_of("clock_j"), "clock_j");
    check_section([&] { cfg.trial.noise.validate(); }, source, line_of("noise"), "noise");
    check_section([&] { cfg.trial.timing.validate(); }, source, line_of("timing"), "timing");
    if (cfg.sweep) {
        check_section([&] { cfg.sweep->validate(); }, source, line_of("sweep"), "sweep");
    }
    check_section([&] { cfg.trial.validate(); }, source, line_of("run"), "run");
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream file(path);
    if (!file) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_run_config(buf.str(), path);
}

std::string serialize_run_config(const RunConfig& cfg)
{
    const TrialConfig& t = cfg.trial;
    std::ostringstream os;
    os << "[scene]\n"
       << "tof = " << fmt_seconds(t.scene.tof_initial) << '\n'
       << "vbar = " << fmt_real(t.scene.vbar) << "\n\n";
    auto clock = [&](const char* name, const ClockParams& c) {
        os << '[' << name << "]\n"
           << "offset = " << fmt_seconds(c.offset) << '\n'
           << "skew = " << fmt_real(c.skew) << "\n\n";
    };
    clock("clock_i", t.clock_i);
    clock("clock_j", t.clock_j);
    os << "[noise]\n"
       << "variance = " << fmt_real(t.noise.variance.value) << '\n'
       << "distribution = " << distribution_name(t.noise.distribution) << '\n'
       << "quantization_tick = "
       << (t.noise.quantization_tick ? fmt_seconds(*t.noise.quantization_tick) : "0") << "\n\n";
    os << "[timing]\n"
       << "dt32 = " << fmt_seconds(t.timing.dt32) << '\n'
       << "dt53 = " << fmt_seconds(t.timing.dt53) << '\n'
       << "processing_T = " << fmt_seconds(t.timing.processing_T) << "\n\n";
    if (cfg.sweep) {
        os << "[sweep]\n"
           << "dt53_min = " << fmt_seconds(cfg.sweep->dt53_min) << '\n'
           << "dt53_max = " << fmt_seconds(cfg.sweep->dt53_max) << '\n'
           << "points = " << cfg.sweep->points << '\n'
           << "log_spaced = " << (cfg.sweep->log_spaced ? "true" : "false") << "\n\n";
    }
    os << "[run]\n"
       << "n_measurements = " << t.n_measurements << '\n'
       << "seed = " << t.seed << '\n';
    if (!cfg.output_path.empty()) {
        os << "output_path = " << cfg.output_path << '\n';
    }
    if (!cfg.timestamp_log.empty()) {
        os << "timestamp_log = " << cfg.timestamp_log << '\n';
    }
    return os.str();
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    const TrialConfig& x = a.trial;
    const TrialConfig& y = b.trial;
    auto same_sweep = [](const std::optional<SweepSpec>& p, const std::optional<SweepSpec>& q) {
        if (p.has_value() != q.has_value()) return false;
        if (!p) return true;
        return p->dt53_min == q->dt53_min && p->dt53_max == q->dt53_max &&
               p->points == q->points && p->log_spaced == q->log_spaced;
    };
    return x.n_measurements == y.n_measurements && x.seed == y.seed &&
           x.timing.dt32 == y.timing.dt32 && x.timing.dt53 == y.timing.dt53 &&
           x.timing.processing_T == y.timing.processing_T &&
           x.scene.tof_initial == y.scene.tof_initial && x.scene.vbar == y.scene.vbar &&
           x.clock_i.offset == y.clock_i.offset && x.clock_i.skew == y.clock_i.skew &&
           x.clock_j.offset == y.clock_j.offset && x.clock_j.skew == y.clock_j.skew &&
           x.noise.variance == y.noise.variance &&
           x.noise.distribution == y.noise.distribution &&
           x.noise.quantization_tick == y.noise.quantization_tick &&
           same_sweep(a.sweep, b.sweep) && a.output_path == b.output_path &&
           a.timestamp_log == b.timestamp_log;
}

}  // namespace twr
