#include "appwatch/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "appwatch/arff.hpp"
#include "appwatch/config.hpp"
#include "appwatch/error.hpp"
#include "appwatch/eval.hpp"
#include "appwatch/events.hpp"
#include "appwatch/extract.hpp"
#include "appwatch/knn.hpp"
#include "appwatch/model.hpp"
#include "appwatch/report.hpp"
#include "appwatch/simulate.hpp"

namespace appwatch::cli {

namespace {

namespace fs = std::filesystem;

class NotFound : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path, std::string_view what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw NotFound(fmt::format("{} not found: {}", what, path));
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    if (!in || !(buf << in.rdbuf())) {
        // An empty file makes operator<< fail without being an error.
        if (in && fs::file_size(path, ec) == 0 && !ec) return {};
        throw Error(fmt::format("cannot read {}: {}", what, path));
    }
    return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())) || !out.flush())
        throw Error(fmt::format("cannot write {}", path));
}

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

config::PipelineConfig load_pipeline(const Globals& g) {
    if (g.config_path.empty()) return {};
    return config::pipeline_from(config::parse(read_file(g.config_path, "config")));
}

std::vector<FeatureInstance> load_training(const std::string& path) {
    return from_arff(arff::parse(read_file(path, "training file")));
}

std::vector<report::SinkSpec> resolve_sinks(const std::vector<std::string>& flags,
                                            const std::vector<report::SinkSpec>& configured) {
    std::vector<report::SinkSpec> sinks;
    for (const auto& f : flags) sinks.push_back(report::SinkSpec::parse(f));
    if (sinks.empty()) sinks = configured;
    if (sinks.empty()) sinks.push_back({});
    return sinks;
}

int report_failures(const std::vector<report::DeliveryFailure>& failures, std::ostream& err) {
    for (const auto& f : failures) err << fmt::format("error: sink {}: {}\n", f.sink.describe(), f.reason);
    return failures.empty() ? kOk : kSinkFailure;
}

std::string describe_scheme(const knn::ClassifierConfig& c) {
    return fmt::format("appwatch.knn -K {}{}", c.k, c.include_identifiers ? " -identifiers" : "");
}

int cmd_simulate(const Globals& g, const std::string& scenario_path, const std::string& out_path) {
    std::string text;
    try {
        text = read_file(scenario_path, "scenario");
    } catch (const NotFound&) {
        throw NotFound(fmt::format("scenario not found: {}", scenario_path));
    }
    auto scenario = config::scenario_from(config::parse(text));
    if (g.seed) scenario.seed = *g.seed;
    write_file(out_path, write_trace(simulate::generate(scenario)));
    return kOk;
}

int cmd_gen_model(const Globals& g, std::optional<std::string> rules_path, std::optional<std::string> app,
                  std::optional<std::string> base_time, const std::string& out_path) {
    const auto pc = load_pipeline(g);
    if (!rules_path) rules_path = pc.rules_file;
    auto rules = rules_path ? model::parse_rules(read_file(*rules_path, "rules file")) : model::default_rules();
    Timestamp base = pc.base_time;
    if (base_time) {
        try {
            base = parse_date(*base_time);
        } catch (const DateError& e) {
            throw ConfigError("base-time", e.what());
        }
    }
    const auto m = model::enumerate(std::move(rules));
    write_file(out_path, arff::serialize(model::to_training_arff(m, AppId(app.value_or(pc.placeholder_app)), base)));
    return kOk;
}

int cmd_extract(const Globals& g, const std::string& trace_path, const std::string& out_path,
                std::optional<std::int64_t> tick, bool csv) {
    const auto pc = load_pipeline(g);
    const auto t = tick.value_or(pc.tick);
    if (t <= 0) throw ConfigError("tick", "must be > 0");
    const auto trace = read_trace(read_file(trace_path, "trace"));
    require_valid(trace);
    const auto instances = extract(trace, t);
    write_file(out_path, csv ? to_csv(instances) : arff::serialize(to_arff(instances)));
    return kOk;
}

struct ClassifierFlags {
    std::optional<std::size_t> k;
    bool include_identifiers = false;

    knn::ClassifierConfig resolve(knn::ClassifierConfig base) const {
        if (k) base.k = *k;
        if (include_identifiers) base.include_identifiers = true;
        return base;
    }
};

int cmd_classify(const Globals& g, const std::string& train_path, const std::string& test_path,
                 const std::string& out_path, const ClassifierFlags& cf, const std::vector<std::string>& sink_flags,
                 std::ostream& out, std::ostream& err) {
    const auto pc = load_pipeline(g);
    const auto sinks = resolve_sinks(sink_flags, pc.sinks);
    const auto training = load_training(train_path);
    const auto classifier = knn::train(training, cf.resolve(pc.classifier));
    const auto test = arff::parse(read_file(test_path, "test file"));
    const auto labeled = knn::classify_document(classifier, test);
    write_file(out_path, arff::serialize(labeled.document));

    const auto rep = report::build(labeled.document, labeled.predictions);
    const report::Payload payload{report::notification_text(rep), report::to_json(rep).dump(2)};
    return report_failures(report::dispatch(sinks, payload, out), err);
}

int cmd_evaluate(const Globals& g, const std::string& train_path, std::optional<std::size_t> folds,
                 const ClassifierFlags& cf, const std::vector<std::string>& sink_flags, std::ostream& out,
                 std::ostream& err) {
    const auto pc = load_pipeline(g);
    const auto sinks = resolve_sinks(sink_flags, pc.sinks);
    const auto k = folds.value_or(pc.folds);
    const auto seed = g.seed.value_or(pc.seed);
    const auto config = cf.resolve(pc.classifier);

    const auto doc = arff::parse(read_file(train_path, "training file"));
    const auto rows = from_arff(doc);
    const auto cv = eval::cross_validate(rows, config, k, seed);

    eval::RunInfo info;
    info.scheme = describe_scheme(config);
    info.relation = doc.relation;
    info.instances = rows.size();
    for (const auto& a : doc.attributes) info.attributes.push_back(a.name);
    info.test_mode = fmt::format("{}-fold stratified cross-validation (seed {})", k, seed);

    const report::Payload payload{eval::render_text(cv.report, info), eval::to_json(cv.report, info).dump(2)};
    return report_failures(report::dispatch(sinks, payload, out), err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Behavioural anomaly detection pipeline for device activity traces", "appwatch"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Pipeline configuration file");
    app.add_option("--seed", g.seed, "Seed override (simulate, evaluate)");

    std::string in_path;
    std::string out_path;

    auto* sim = app.add_subcommand("simulate", "Generate a device activity trace from a scenario file");
    sim->add_option("scenario", in_path, "Scenario file")->required();
    sim->add_option("-o,--out", out_path, "Trace file to write")->required();

    std::optional<std::string> rules_path;
    std::optional<std::string> placeholder;
    std::optional<std::string> base_time;
    auto* gen = app.add_subcommand("gen-model", "Write the enumerated normality model as a training ARFF");
    gen->add_option("--rules", rules_path, "Rule file (default: built-in rules)");
    gen->add_option("--app", placeholder, "AppName given to every model row");
    gen->add_option("--base-time", base_time, "Time of the first model row (MM.dd.yyyy HH:mm:ss)");
    gen->add_option("-o,--out", out_path, "ARFF file to write")->required();

    std::optional<std::int64_t> tick;
    bool csv = false;
    auto* ext = app.add_subcommand("extract", "Turn a trace into unlabelled feature vectors");
    ext->add_option("trace", in_path, "Trace file")->required();
    ext->add_option("-o,--out", out_path, "Output file")->required();
    ext->add_option("--tick", tick, "Seconds between snapshot rows");
    ext->add_flag("--csv", csv, "Write CSV instead of ARFF");

    std::string train_path;
    std::vector<std::string> sinks;
    ClassifierFlags cf;
    auto* cls = app.add_subcommand("classify", "Label a test ARFF against a training ARFF and report");
    cls->add_option("--train", train_path, "Training ARFF")->required();
    cls->add_option("--test", in_path, "Test ARFF")->required();
    cls->add_option("-o,--out", out_path, "Labelled ARFF to write")->required();
    cls->add_option("--sink", sinks, "stdout, file:<path> or http://... (repeatable)");
    cls->add_option("--k", cf.k, "Neighbours consulted");
    cls->add_flag("--include-identifiers", cf.include_identifiers, "Use Time and AppName in the distance");

    std::optional<std::size_t> folds;
    auto* evl = app.add_subcommand("evaluate", "Stratified cross-validation of a training ARFF");
    evl->add_option("--train", train_path, "Training ARFF")->required();
    evl->add_option("--folds", folds, "Number of folds (>= 2)");
    evl->add_option("--sink", sinks, "stdout, file:<path> or http://... (repeatable)");
    evl->add_option("--k", cf.k, "Neighbours consulted");
    evl->add_flag("--include-identifiers", cf.include_identifiers, "Use Time and AppName in the distance");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfig;
    }

    try {
        if (*sim) return cmd_simulate(g, in_path, out_path);
        if (*gen) return cmd_gen_model(g, rules_path, placeholder, base_time, out_path);
        if (*ext) return cmd_extract(g, in_path, out_path, tick, csv);
        if (*cls) return cmd_classify(g, train_path, in_path, out_path, cf, sinks, out, err);
        if (*evl) return cmd_evaluate(g, train_path, folds, cf, sinks, out, err);
    } catch (const ConfigError& e) {
        err << "error: config: " << e.what() << "\n";
        return kConfig;
    } catch (const ParseError& e) {
        err << "error: parse: " << e.what() << "\n";
        return kParse;
    } catch (const DateError& e) {
        err << "error: date: " << e.what() << "\n";
        return kParse;
    } catch (const SchemaError& e) {
        err << "error: schema: " << e.what() << "\n";
        return kSchema;
    } catch (const ValidationError& e) {
        err << "error: invalid trace: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace appwatch::cli
