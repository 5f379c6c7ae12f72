#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "corset/dataset.hpp"
#include "corset/head_sampler.hpp"
#include "corset/label_space.hpp"
#include "corset/learner.hpp"
#include "corset/metrics.hpp"
#include "corset/model_io.hpp"
#include "corset/synth.hpp"
#include "corset/tail_sampler.hpp"

using namespace corset;
using nlohmann::json;

namespace {

struct InputOptions {
    std::string sparse_path;
    std::string dense_features;
    std::string dense_labels;
    int dense_n_labels = 0;
    double percentile = 90.0;
};

void add_input_options(CLI::App* cmd, InputOptions& input) {
    auto* sparse = cmd->add_option("--input,-i", input.sparse_path,
                                   "dataset in the sparse text format");
    auto* dense = cmd->add_option("--dense-features", input.dense_features,
                                  "headerless CSV of numeric features");
    cmd->add_option("--dense-labels", input.dense_labels,
                    "label sidecar (one line of label ids per record)")
        ->needs(dense);
    cmd->add_option("--dense-n-labels", input.dense_n_labels,
                    "label-space size of the dense sidecar")
        ->needs(dense);
    cmd->add_option("--percentile,-p", input.percentile,
                    "binarization percentile for dense input (default 90)");
    dense->excludes(sparse);
    sparse->excludes(dense);
}

Dataset load_input(const InputOptions& input) {
    if (!input.sparse_path.empty()) return Dataset::load_sparse(input.sparse_path);
    if (!input.dense_features.empty()) {
        if (input.dense_labels.empty() || input.dense_n_labels <= 0)
            throw CLI::ValidationError(
                "--dense-features needs --dense-labels and --dense-n-labels");
        return Dataset::load_dense_csv(input.dense_features, input.dense_labels,
                                       input.dense_n_labels, input.percentile);
    }
    throw CLI::ValidationError("no input dataset given (use --input or --dense-features)");
}

struct LearnerFlags {
    LearnerConfig config;
    double tau = -1.0;  // <0 means unset
    std::string variant = "gh";

    LearnerFlags() {
        config.threads =
            std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--lambda", config.lambda, "diversity weight (default 1.0)");
        auto* tau_opt =
            cmd->add_option("--tau", tau, "tolerance stopping threshold in [0,1]");
        auto* cap_opt = cmd->add_option("--max-rules", config.max_rules,
                                        "rule budget cap (default 150)");
        tau_opt->excludes(cap_opt);
        cap_opt->excludes(tau_opt);
        cmd->add_option("--pool-size", config.pool_size,
                        "candidates per iteration (default 500)");
        cmd->add_option("--variant", variant, "head sampler: surs or gh (default gh)");
        cmd->add_flag("--two-pass", config.two_pass,
                      "run the second greedy pass over the candidate archive");
        cmd->add_option("--theta", config.theta,
                        "clique probability threshold for the sample space");
        cmd->add_option("--max-size", config.max_itemset_size,
                        "itemset size cap for the sample space (default 5)");
        cmd->add_option("--gamma", config.greedy.gamma,
                        "negative-support penalty of the greedy head");
        cmd->add_option("--epsilon", config.greedy.epsilon,
                        "early-stop support fraction of the greedy head");
        cmd->add_option("--clique-budget", config.clique_node_budget,
                        "DFS node budget for clique enumeration");
        cmd->add_option("--seed", config.seed, "RNG seed (default 0)");
        cmd->add_option("--threads", config.threads,
                        "worker threads for pool generation (default: all cores; "
                        "results are identical for any thread count)");
    }

    LearnerConfig resolve() {
        if (tau >= 0.0) config.tau = tau;
        config.variant = head_variant_from_string(variant);
        config.validate();
        return config;
    }
};

IdSet parse_id_list(const std::string& text) {
    IdSet out;
    std::string spaced = text;
    for (char& c : spaced)
        if (c == ',') c = ' ';
    std::istringstream is(spaced);
    long v = 0;
    while (is >> v) out.push_back(static_cast<std::int32_t>(v));
    if (!is.eof()) throw CLI::ValidationError("bad id list '" + text + "'");
    sort_unique(out);
    return out;
}

std::string format_ids(const IdSet& ids) {
    std::ostringstream os;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) os << ' ';
        os << ids[i];
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

int cmd_generate(const GeneratorConfig& gen, const std::string& out_path,
                 const std::string& truth_path, const std::string& split_spec,
                 const std::string& mode) {
    GeneratorConfig config = gen;
    config.mode = mode == "skewed" ? CoverageMode::skewed : CoverageMode::uniform;
    auto [dataset, truth] = generate(config);
    dataset.save_sparse(out_path);
    if (!truth_path.empty()) save_ground_truth(truth_path, truth);
    if (!split_spec.empty()) {
        std::array<double, 3> fractions{};
        std::string spaced = split_spec;
        for (char& c : spaced)
            if (c == ',') c = ' ';
        std::istringstream is(spaced);
        if (!(is >> fractions[0] >> fractions[1] >> fractions[2]))
            throw CLI::ValidationError("--split expects three fractions, e.g. 0.7,0.1,0.2");
        const SplitResult parts = split(dataset, fractions, config.seed);
        parts.train.save_sparse(out_path + ".train");
        parts.validation.save_sparse(out_path + ".valid");
        parts.test.save_sparse(out_path + ".test");
    }
    std::cout << "wrote " << out_path << " (" << dataset.size() << " records, "
              << dataset.n_features() << " features, " << dataset.n_labels() << " labels)\n";
    return 0;
}

int cmd_train(const InputOptions& input, LearnerFlags& flags, const std::string& model_path) {
    const Dataset dataset = load_input(input);
    const LearnerConfig config = flags.resolve();
    const RuleSetModel model = fit(dataset, config);
    for (const auto& entry : model.trace)
        std::cout << "iter=" << entry.iteration << " pool=" << entry.pool_size
                  << " dead=" << entry.dead_candidates << " rule={"
                  << format_ids(entry.head) << "} -> {" << format_ids(entry.tail)
                  << "} gain=" << entry.gain << " c=" << entry.coverage_ratio
                  << " objective=" << entry.objective << '\n';
    std::cout << "rules=" << model.rules.size() << " objective=" << model.objective
              << " stop=" << model.stop_reason << '\n';
    save_model(model_path, model, dataset);
    std::cout << "wrote " << model_path << '\n';
    return 0;
}

int cmd_predict(const InputOptions& input, const std::string& model_path,
                const std::string& out_path) {
    const Dataset dataset = load_input(input);
    const StoredModel model = load_model(model_path);
    std::ostringstream os;
    for (const auto& record : dataset.records())
        os << format_ids(predict(model.rules, record.features)) << '\n';
    if (out_path.empty())
        std::cout << os.str();
    else
        write_text(out_path, os.str());
    return 0;
}

int cmd_evaluate(const InputOptions& input, const std::string& model_path,
                 bool ignore_absent, const std::string& json_path) {
    const Dataset dataset = load_input(input);
    const StoredModel model = load_model(model_path);
    const MetricReport report = evaluate(model.rules, dataset, ignore_absent);
    std::cout << report.to_table();
    json j{{"micro_f1", report.micro_f1},
           {"macro_f1", report.macro_f1},
           {"hamming_score", report.hamming_score},
           {"avg_pairwise_overlap", report.avg_pairwise_overlap},
           {"rule_count", report.rule_count},
           {"ignore_absent_labels", ignore_absent},
           {"model_seed", model.seed}};
    if (!json_path.empty()) write_text(json_path, j.dump(2) + "\n");
    return 0;
}

int cmd_stats(const InputOptions& input, const std::string& json_path) {
    const Dataset dataset = load_input(input);
    json j{{"records", dataset.size()},
           {"features", dataset.n_features()},
           {"labels", dataset.n_labels()},
           {"cardinality", dataset.label_cardinality()},
           {"distinct_label_sets", dataset.distinct_label_sets()},
           {"feature_occurrences", dataset.total_feature_occurrences()},
           {"label_occurrences", dataset.total_label_occurrences()}};
    std::cout << "records             " << dataset.size() << '\n'
              << "features            " << dataset.n_features() << '\n'
              << "labels              " << dataset.n_labels() << '\n'
              << "cardinality         " << dataset.label_cardinality() << '\n'
              << "distinct label sets " << dataset.distinct_label_sets() << '\n';
    if (!json_path.empty()) write_text(json_path, j.dump(2) + "\n");
    return 0;
}

int cmd_sample_tails(const InputOptions& input, const std::string& model_path,
                     const std::string& space_kind, int count, double theta, int max_size,
                     std::uint64_t seed, const std::string& dump_path) {
    const Dataset dataset = load_input(input);
    RuleSet selected(dataset);
    if (!model_path.empty())
        for (const Rule& rule : load_model(model_path).build_rules(dataset))
            selected.insert(rule);
    Rng rng = make_rng(seed, 0x7a115);

    if (space_kind == "full") {
        if (!dump_path.empty())
            throw CLI::ValidationError("--dump-space needs --space reduced");
        const TailWeights weights = compute_weights_full(dataset, selected);
        for (int i = 0; i < count; ++i) {
            const auto tail = sample_tail_full(dataset, weights, rng);
            if (!tail) {
                std::cerr << "every label occurrence is covered\n";
                return 0;
            }
            std::cout << format_ids(*tail) << '\t'
                      << uncovered_area(tail_coverage(dataset, *tail), selected) << '\n';
        }
        return 0;
    }
    const auto space =
        enumerate_probable_cliques(build_label_graph(dataset), theta, max_size);
    if (!dump_path.empty()) dump_space(space, dump_path);
    const ContainmentIndex index = build_containment_index(dataset, space);
    const TailWeights weights = compute_weights_reduced(dataset, index, selected);
    for (int i = 0; i < count; ++i) {
        const auto tail = sample_tail_reduced(dataset, index, selected, weights, rng);
        if (!tail) {
            std::cerr << "every label occurrence is covered\n";
            return 0;
        }
        std::cout << format_ids(*tail) << '\t'
                  << uncovered_area(tail_coverage(dataset, *tail), selected) << '\n';
    }
    return 0;
}

int cmd_sample_heads(const InputOptions& input, const std::string& tail_text,
                     const std::string& mode, int count, double theta, int max_size,
                     double gamma, double epsilon, std::uint64_t seed) {
    const Dataset dataset = load_input(input);
    const IdSet tail = parse_id_list(tail_text);
    if (tail.empty()) throw CLI::ValidationError("--tail must list at least one label id");
    const Bipartition bipartition = Bipartition::split(dataset, tail);
    if (bipartition.positives.empty())
        throw std::runtime_error("tail matches no record; nothing to sample");
    Rng rng = make_rng(seed, 0x4ead5);

    std::unique_ptr<InterpretableSpace> space;
    std::unique_ptr<ContainmentIndex> index;
    if (mode == "reduced") {
        space = std::make_unique<InterpretableSpace>(
            build_feature_space(dataset, theta, max_size));
        index = std::make_unique<ContainmentIndex>(
            build_feature_containment_index(dataset, *space));
    }

    for (int i = 0; i < count; ++i) {
        IdSet head;
        if (mode == "greedy") {
            const auto pair = proposal_pair(dataset, bipartition, rng);
            if (!pair) throw std::runtime_error("no usable record pair for this tail");
            head = greedy_head(dataset, bipartition, *pair, GreedyParams{gamma, epsilon});
        } else {
            const HeadResult res =
                mode == "reduced"
                    ? sample_head_reduced(dataset, bipartition, *index, rng)
                    : sample_head_full(dataset, bipartition, rng);
            if (res.status != HeadSampleStatus::ok)
                throw std::runtime_error("head sampling failed (tail unlearnable or timeout)");
            head = res.head;
        }
        std::cout << format_ids(head) << '\t'
                  << discriminativity(dataset, bipartition, head) << '\t'
                  << dataset.head_support(head).size() << '\n';
    }
    return 0;
}

int cmd_sweep_lambda(const InputOptions& input, const InputOptions& test_input,
                     LearnerFlags& flags, double lambda_min, double lambda_max,
                     double ratio, int repeats, const std::string& out_path) {
    const Dataset train = load_input(input);
    std::unique_ptr<Dataset> test;
    if (!test_input.sparse_path.empty() || !test_input.dense_features.empty())
        test = std::make_unique<Dataset>(load_input(test_input));

    LearnerConfig base = flags.resolve();
    std::ostringstream os;
    os << "# lambda\tavg_pairwise_overlap\tmicro_f1\tseeds=" << repeats
       << "\tbase_seed=" << base.seed << '\n';
    for (double lambda = lambda_min; lambda <= lambda_max * (1.0 + 1e-12); lambda *= ratio) {
        double overlap_sum = 0.0;
        double f1_sum = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            LearnerConfig config = base;
            config.lambda = lambda;
            config.seed = base.seed + static_cast<std::uint64_t>(rep);
            const RuleSetModel model = fit(train, config);
            overlap_sum += avg_pairwise_overlap(model.rules);
            std::vector<std::pair<IdSet, IdSet>> rules;
            for (const Rule& rule : model.rules) rules.emplace_back(rule.head, rule.tail);
            f1_sum += evaluate(rules, test ? *test : train).micro_f1;
        }
        os << lambda << '\t' << overlap_sum / repeats << '\t' << f1_sum / repeats << '\n';
    }
    if (out_path.empty())
        std::cout << os.str();
    else
        write_text(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concise multi-label rule sets: train, sample, and evaluate"};
    app.require_subcommand(1);

    // generate
    GeneratorConfig gen;
    std::string gen_out = "synthetic.txt", gen_truth, gen_split, gen_mode = "uniform";
    auto* generate_cmd = app.add_subcommand("generate", "plant a synthetic dataset");
    generate_cmd->add_option("--records", gen.n_records, "number of records");
    generate_cmd->add_option("--features", gen.n_features, "feature-space size");
    generate_cmd->add_option("--labels", gen.n_labels, "label-space size");
    generate_cmd->add_option("--rules", gen.n_rules,
                             "planted rules (default floor(min(F,L)/3))");
    generate_cmd->add_option("--features-per-rule", gen.features_per_rule, "head size");
    generate_cmd->add_option("--labels-per-rule", gen.labels_per_rule, "tail size");
    generate_cmd->add_option("--coverage", gen_mode, "support law: uniform or skewed");
    generate_cmd->add_option("--noise", gen.noise, "flip probability per cell");
    generate_cmd->add_option("--seed", gen.seed, "RNG seed");
    generate_cmd->add_option("--output,-o", gen_out, "output path (sparse format)");
    generate_cmd->add_option("--ground-truth", gen_truth, "ground-truth JSON sidecar");
    generate_cmd->add_option("--split", gen_split,
                             "also write .train/.valid/.test files, e.g. 0.7,0.1,0.2");

    // train
    InputOptions train_input;
    LearnerFlags train_flags;
    std::string model_out = "model.json";
    auto* train_cmd = app.add_subcommand("train", "learn a rule set");
    add_input_options(train_cmd, train_input);
    train_flags.add_to(train_cmd);
    train_cmd->add_option("--output,-o", model_out, "model file (default model.json)");

    // predict
    InputOptions predict_input;
    std::string predict_model, predict_out;
    auto* predict_cmd = app.add_subcommand("predict", "predict label sets");
    add_input_options(predict_cmd, predict_input);
    predict_cmd->add_option("--model,-m", predict_model, "trained model file")->required();
    predict_cmd->add_option("--output,-o", predict_out, "write predictions here");

    // evaluate
    InputOptions eval_input;
    std::string eval_model, eval_json;
    bool ignore_absent = false;
    auto* eval_cmd = app.add_subcommand("evaluate", "score a model against labeled data");
    add_input_options(eval_cmd, eval_input);
    eval_cmd->add_option("--model,-m", eval_model, "trained model file")->required();
    eval_cmd->add_flag("--ignore-absent-labels", ignore_absent,
                       "exclude labels absent from gold and predictions from macro F1");
    eval_cmd->add_option("--json", eval_json, "write the report as JSON here");

    // stats
    InputOptions stats_input;
    std::string stats_json;
    auto* stats_cmd = app.add_subcommand("stats", "dataset summary statistics");
    add_input_options(stats_cmd, stats_input);
    stats_cmd->add_option("--json", stats_json, "write the summary as JSON here");

    // sample-tails
    InputOptions tails_input;
    std::string tails_model, tails_space = "reduced", tails_dump;
    int tails_count = 20, tails_max_size = 5;
    double tails_theta = 0.2;
    std::uint64_t tails_seed = 0;
    auto* tails_cmd = app.add_subcommand("sample-tails", "diagnostic tail draws");
    add_input_options(tails_cmd, tails_input);
    tails_cmd->add_option("--model,-m", tails_model, "condition on this model's rules");
    tails_cmd->add_option("--space", tails_space, "full or reduced (default reduced)");
    tails_cmd->add_option("--count,-n", tails_count, "number of draws");
    tails_cmd->add_option("--theta", tails_theta, "clique threshold (reduced space)");
    tails_cmd->add_option("--max-size", tails_max_size, "itemset cap (reduced space)");
    tails_cmd->add_option("--seed", tails_seed, "RNG seed");
    tails_cmd->add_option("--dump-space", tails_dump,
                          "write the interpretable label space (items TAB probability)");

    // sample-heads
    InputOptions heads_input;
    std::string heads_tail, heads_mode = "full";
    int heads_count = 20, heads_max_size = 5;
    double heads_theta = 0.2, heads_gamma = 0.5, heads_epsilon = 0.05;
    std::uint64_t heads_seed = 0;
    auto* heads_cmd = app.add_subcommand("sample-heads", "diagnostic head draws for a tail");
    add_input_options(heads_cmd, heads_input);
    heads_cmd->add_option("--tail", heads_tail, "label ids, e.g. 1,2,3")->required();
    heads_cmd->add_option("--mode", heads_mode, "full, reduced, or greedy (default full)");
    heads_cmd->add_option("--count,-n", heads_count, "number of draws");
    heads_cmd->add_option("--theta", heads_theta, "clique threshold (reduced mode)");
    heads_cmd->add_option("--max-size", heads_max_size, "itemset cap (reduced mode)");
    heads_cmd->add_option("--gamma", heads_gamma, "greedy-mode penalty");
    heads_cmd->add_option("--epsilon", heads_epsilon, "greedy-mode early stop");
    heads_cmd->add_option("--seed", heads_seed, "RNG seed");

    // sweep-lambda
    InputOptions sweep_input, sweep_test;
    LearnerFlags sweep_flags;
    double sweep_min = 0.01, sweep_max = 100.0, sweep_ratio = 10.0;
    int sweep_repeats = 10;
    std::string sweep_out;
    auto* sweep_cmd =
        app.add_subcommand("sweep-lambda", "diversity/accuracy trade-off over a lambda grid");
    add_input_options(sweep_cmd, sweep_input);
    sweep_cmd->add_option("--test", sweep_test.sparse_path,
                          "held-out data for micro F1 (defaults to the training data)");
    sweep_flags.add_to(sweep_cmd);
    sweep_cmd->add_option("--lambda-min", sweep_min, "grid start (default 0.01)");
    sweep_cmd->add_option("--lambda-max", sweep_max, "grid end (default 100)");
    sweep_cmd->add_option("--ratio", sweep_ratio, "geometric ratio (default 10)");
    sweep_cmd->add_option("--repeats", sweep_repeats, "seeds per grid point (default 10)");
    sweep_cmd->add_option("--output,-o", sweep_out, "TSV output path");

    try {
        app.parse(argc, argv);
        if (generate_cmd->parsed())
            return cmd_generate(gen, gen_out, gen_truth, gen_split, gen_mode);
        if (train_cmd->parsed()) return cmd_train(train_input, train_flags, model_out);
        if (predict_cmd->parsed()) return cmd_predict(predict_input, predict_model, predict_out);
        if (eval_cmd->parsed())
            return cmd_evaluate(eval_input, eval_model, ignore_absent, eval_json);
        if (stats_cmd->parsed()) return cmd_stats(stats_input, stats_json);
        if (tails_cmd->parsed())
            return cmd_sample_tails(tails_input, tails_model, tails_space, tails_count,
                                    tails_theta, tails_max_size, tails_seed, tails_dump);
        if (heads_cmd->parsed())
            return cmd_sample_heads(heads_input, heads_tail, heads_mode, heads_count,
                                    heads_theta, heads_max_size, heads_gamma, heads_epsilon,
                                    heads_seed);
        if (sweep_cmd->parsed())
            return cmd_sweep_lambda(sweep_input, sweep_test, sweep_flags, sweep_min,
                                    sweep_max, sweep_ratio, sweep_repeats, sweep_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
