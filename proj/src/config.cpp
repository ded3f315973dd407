#include "ncsnaf/config.hpp"

#include "ncsnaf/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ncsnaf::harness {

namespace {

std::string fmt_double(double v) {
    // Shortest text that parses back to the same double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + raw + "'");
    }
    if (used != s.size())
        throw ConfigError("expected a number, got '" + raw + "'");
    return v;
}

long long parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + raw + "'");
    }
    if (used != s.size())
        throw ConfigError("expected an integer, got '" + raw + "'");
    return v;
}

std::size_t parse_count(const std::string& raw) {
    const long long v = parse_int(raw);
    if (v < 0)
        throw ConfigError("expected a non-negative integer, got '" + raw + "'");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1")
        return true;
    if (s == "false" || s == "0")
        return false;
    throw ConfigError("expected true or false, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> items;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        items.push_back(trim(item));
    if (items.empty())
        throw ConfigError("expected a comma-separated list");
    return items;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& v, Fmt fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ",";
        out += fmt(v[i]);
    }
    return out;
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

using FieldTable = std::vector<std::pair<std::string, Field>>; // "section.key" in output order

Field dbl(double agent::TrainConfig::*member) {
    return {[member](ExperimentConfig& c, const std::string& v) { c.train.*member = parse_double(v); },
            [member](const ExperimentConfig& c) { return fmt_double(c.train.*member); }};
}

// Delay bounds in sampling periods; stored in seconds.
Field delay_periods(double delay::DelayModel::*member) {
    return {[member](ExperimentConfig& c, const std::string& v) {
                c.train.delays.*member = parse_double(v) * c.train.sample_period;
            },
            [member](const ExperimentConfig& c) {
                return fmt_double(c.train.delays.*member / c.train.sample_period);
            }};
}

Field learner_dbl(double agent::LearnerConfig::*member) {
    return {[member](ExperimentConfig& c, const std::string& v) { c.train.learner.*member = parse_double(v); },
            [member](const ExperimentConfig& c) { return fmt_double(c.train.learner.*member); }};
}

Field learner_count(std::size_t agent::LearnerConfig::*member) {
    return {[member](ExperimentConfig& c, const std::string& v) { c.train.learner.*member = parse_count(v); },
            [member](const ExperimentConfig& c) { return std::to_string(c.train.learner.*member); }};
}

const FieldTable& fields() {
    static const FieldTable table = [] {
        FieldTable t;
        t.emplace_back("plant.p1", Field{[](ExperimentConfig& c, const std::string& v) { c.train.chua.p1 = parse_double(v); },
                                         [](const ExperimentConfig& c) { return fmt_double(c.train.chua.p1); }});
        t.emplace_back("plant.p2", Field{[](ExperimentConfig& c, const std::string& v) { c.train.chua.p2 = parse_double(v); },
                                         [](const ExperimentConfig& c) { return fmt_double(c.train.chua.p2); }});
        // Changing the period rescales delays given in periods, so it is
        // applied first (see parse order below).
        t.emplace_back("plant.sample_period",
                       Field{[](ExperimentConfig& c, const std::string& v) {
                                 const double old = c.train.sample_period;
                                 const double p = parse_double(v);
                                 if (!(p > 0.0))
                                     throw ConfigError("must be positive");
                                 auto& d = c.train.delays;
                                 d.min_sc = d.min_sc / old * p;
                                 d.max_sc = d.max_sc / old * p;
                                 d.min_cp = d.min_cp / old * p;
                                 d.max_cp = d.max_cp / old * p;
                                 d.period = p;
                                 c.train.sample_period = p;
                             },
                             [](const ExperimentConfig& c) { return fmt_double(c.train.sample_period); }});
        t.emplace_back("plant.substeps",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.substeps = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.substeps); }});

        t.emplace_back("delay.distribution",
                       Field{[](ExperimentConfig& c, const std::string& v) {
                                 const std::string s = trim(v);
                                 if (s == "uniform_continuous")
                                     c.train.delays.distribution = delay::DelayDistribution::UniformContinuous;
                                 else if (s == "uniform_multiples")
                                     c.train.delays.distribution = delay::DelayDistribution::UniformMultiplesOfPeriod;
                                 else
                                     throw ConfigError("expected uniform_continuous or uniform_multiples, got '" + v + "'");
                             },
                             [](const ExperimentConfig& c) {
                                 return std::string(c.train.delays.distribution == delay::DelayDistribution::UniformContinuous
                                                        ? "uniform_continuous"
                                                        : "uniform_multiples");
                             }});
        t.emplace_back("delay.sc_min", delay_periods(&delay::DelayModel::min_sc));
        t.emplace_back("delay.sc_max", delay_periods(&delay::DelayModel::max_sc));
        t.emplace_back("delay.cp_min", delay_periods(&delay::DelayModel::min_cp));
        t.emplace_back("delay.cp_max", delay_periods(&delay::DelayModel::max_cp));
        t.emplace_back("delay.sc_bound",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.delays.bound_sc = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.delays.bound_sc); }});
        t.emplace_back("delay.cp_bound",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.delays.bound_cp = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.delays.bound_cp); }});

        t.emplace_back("state.tau",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.declared_tau = parse_int(v); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.delays.tau()); }});
        t.emplace_back("state.tau_o",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.tau_o = parse_int(v); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.tau_o); }});

        t.emplace_back("network.hidden",
                       Field{[](ExperimentConfig& c, const std::string& v) {
                                 std::vector<Eigen::Index> widths;
                                 for (const auto& item : split_list(v))
                                     widths.push_back(parse_int(item));
                                 c.train.hidden = widths;
                             },
                             [](const ExperimentConfig& c) {
                                 return join(c.train.hidden, [](Eigen::Index w) { return std::to_string(w); });
                             }});
        t.emplace_back("network.tanh_weight", dbl(&agent::TrainConfig::tanh_weight));

        t.emplace_back("train.episodes",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.episodes = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.episodes); }});
        t.emplace_back("train.horizon", dbl(&agent::TrainConfig::horizon));
        t.emplace_back("train.gamma", learner_dbl(&agent::LearnerConfig::gamma));
        t.emplace_back("train.beta", learner_dbl(&agent::LearnerConfig::beta));
        t.emplace_back("train.batch_size", learner_count(&agent::LearnerConfig::batch_size));
        t.emplace_back("train.iterations", learner_count(&agent::LearnerConfig::iterations));
        t.emplace_back("train.update_period", learner_count(&agent::LearnerConfig::update_period));
        t.emplace_back("train.learning_rate", learner_dbl(&agent::LearnerConfig::learning_rate));
        t.emplace_back("train.adam_beta1", learner_dbl(&agent::LearnerConfig::adam_beta1));
        t.emplace_back("train.adam_beta2", learner_dbl(&agent::LearnerConfig::adam_beta2));
        t.emplace_back("train.adam_epsilon", learner_dbl(&agent::LearnerConfig::adam_epsilon));
        t.emplace_back("train.warmup", learner_count(&agent::LearnerConfig::warmup));
        t.emplace_back("train.replay_capacity", learner_count(&agent::LearnerConfig::replay_capacity));
        t.emplace_back("train.init_box", dbl(&agent::TrainConfig::init_box));
        t.emplace_back("train.metric_start",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.metric_start = parse_count(v); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.metric_start); }});
        t.emplace_back("train.divergence_threshold", dbl(&agent::TrainConfig::divergence_threshold));
        t.emplace_back("train.divergence_penalty", dbl(&agent::TrainConfig::divergence_penalty));

        t.emplace_back("noise.theta", dbl(&agent::TrainConfig::ou_theta));
        t.emplace_back("noise.sigma", dbl(&agent::TrainConfig::ou_sigma));
        t.emplace_back("noise.scale",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.noise.scale = parse_double(v); },
                             [](const ExperimentConfig& c) { return fmt_double(c.train.noise.scale); }});
        t.emplace_back("noise.hold_episodes",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.noise.hold_episodes = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.train.noise.hold_episodes); }});
        t.emplace_back("noise.final_scale",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.noise.final_scale = parse_double(v); },
                             [](const ExperimentConfig& c) { return fmt_double(c.train.noise.final_scale); }});

        t.emplace_back("reward.output_weights",
                       Field{[](ExperimentConfig& c, const std::string& v) {
                                 const auto items = split_list(v);
                                 Eigen::VectorXd w(static_cast<Eigen::Index>(items.size()));
                                 for (std::size_t i = 0; i < items.size(); ++i)
                                     w[static_cast<Eigen::Index>(i)] = parse_double(items[i]);
                                 c.train.reward.output_weights = w;
                             },
                             [](const ExperimentConfig& c) {
                                 const auto& w = c.train.reward.output_weights;
                                 return join(std::vector<double>(w.data(), w.data() + w.size()), fmt_double);
                             }});
        t.emplace_back("reward.effort",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.reward.effort = parse_double(v); },
                             [](const ExperimentConfig& c) { return fmt_double(c.train.reward.effort); }});
        t.emplace_back("reward.smoothness",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.train.reward.smoothness = parse_double(v); },
                             [](const ExperimentConfig& c) { return fmt_double(c.train.reward.smoothness); }});

        t.emplace_back("run.seed",
                       Field{[](ExperimentConfig& c, const std::string& v) {
                                 const long long s = parse_int(v);
                                 if (s < 0)
                                     throw ConfigError("must be non-negative");
                                 c.seed = static_cast<std::uint64_t>(s);
                             },
                             [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
        t.emplace_back("run.out", Field{[](ExperimentConfig& c, const std::string& v) { c.out = trim(v); },
                                        [](const ExperimentConfig& c) { return c.out; }});
        t.emplace_back("run.checkpoint_every",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.checkpoint_every = static_cast<int>(parse_int(v)); },
                             [](const ExperimentConfig& c) { return std::to_string(c.checkpoint_every); }});
        t.emplace_back("run.wall_clock",
                       Field{[](ExperimentConfig& c, const std::string& v) { c.wall_clock = parse_bool(v); },
                             [](const ExperimentConfig& c) { return std::string(c.wall_clock ? "true" : "false"); }});
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& name) {
    for (const auto& [key, field] : fields())
        if (key == name)
            return &field;
    return nullptr;
}

} // namespace

void ExperimentConfig::validate() const {
    train.validate();
    if (declared_tau && *declared_tau != train.delays.tau())
        throw ConfigError("state.tau: " + std::to_string(*declared_tau) + " != delay.sc_bound + delay.cp_bound = " +
                          std::to_string(train.delays.tau()));
    if (checkpoint_every < 0)
        throw ConfigError("run.checkpoint_every: must be non-negative (0 disables periodic checkpoints)");
}

std::filesystem::path ExperimentConfig::resolved_out() const {
    if (!out.empty())
        return out;
    const char* root = std::getenv(kOutRootEnv);
    const std::filesystem::path base = root != nullptr && *root != '\0' ? root : "runs";
    return base / ("seed_" + std::to_string(seed));
}

ExperimentConfig default_config() { return {}; }

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    // Collect assignments first so plant.sample_period lands before the
    // delay fields that are expressed in periods.
    std::vector<std::pair<std::string, std::string>> assignments;
    std::vector<std::string> problems;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            problems.push_back(section + ": key outside of any section");
            continue;
        }
        const bool known_section = std::any_of(fields().begin(), fields().end(), [&](const auto& f) {
            return f.first.compare(0, section.size() + 1, section + ".") == 0;
        });
        if (!known_section) {
            problems.push_back(section + ": unknown section");
            continue;
        }
        for (const auto& [key, value] : body) {
            const std::string name = section + "." + key;
            if (find_field(name) == nullptr)
                problems.push_back(name + ": unknown key");
            else
                assignments.emplace_back(name, value.data());
        }
    }
    std::stable_partition(assignments.begin(), assignments.end(),
                          [](const auto& a) { return a.first == "plant.sample_period"; });

    for (const auto& [name, value] : assignments) {
        try {
            find_field(name)->set(base, value);
        } catch (const Error& e) {
            problems.push_back(name + ": " + e.what());
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    const std::string name = trim(assignment.substr(0, eq));
    const Field* field = find_field(name);
    if (field == nullptr)
        throw ConfigError(name + ": unknown key");
    try {
        field->set(config, assignment.substr(eq + 1));
    } catch (const Error& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

std::string to_ini(const ExperimentConfig& config) {
    std::string out;
    std::string current;
    for (const auto& [name, field] : fields()) {
        const auto dot = name.find('.');
        const std::string section = name.substr(0, dot);
        if (section != current) {
            if (!current.empty())
                out += "\n";
            out += "[" + section + "]\n";
            current = section;
        }
        out += name.substr(dot + 1) + " = " + field.get(config) + "\n";
    }
    return out;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [name, field] : fields())
        keys.push_back(name);
    return keys;
}

} // namespace ncsnaf::harness
