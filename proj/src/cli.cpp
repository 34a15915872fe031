#include "ptsee/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ptsee/checkpoint.hpp"
#include "ptsee/dataset.hpp"
#include "ptsee/evaluation.hpp"
#include "ptsee/exemplars.hpp"
#include "ptsee/sweep.hpp"
#include "ptsee/trainer.hpp"

namespace ptsee::cli {

namespace fs = std::filesystem;

namespace {

const CLI::Validator kDataSource(
    [](std::string& s) { return validate_data_source(s); }, "DATA", "data source");

const CLI::Validator kWritable(
    [](std::string& s) -> std::string {
      const fs::path parent = fs::path(s).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) return "output directory does not exist: " + parent.string();
      return {};
    },
    "OUT", "writable output path");

std::vector<std::size_t> parse_counts(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v == 0) {
      throw CLI::ValidationError(what, "expected a comma-separated list of positive integers, got '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

struct TrainOverrides {
  std::optional<std::string> method, activation, seeding, data, test_data, label_column, hidden_layers;
  std::optional<double> perplexity, lr, momentum, k_e, grad_clip;
  std::optional<std::size_t> batch_size, epochs, z, z_e, z_n, factors, hidden_units, kmeans_iters, train_rows,
      test_rows;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App& app) {
    app.add_option("--method", method, "pt-sne | hot-sne | dt-see | hot-see")
        ->check(CLI::IsMember({"pt-sne", "hot-sne", "dt-see", "hot-see"}));
    app.add_option("--perplexity", perplexity, "target perplexity u")->check(CLI::PositiveNumber);
    app.add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
    app.add_option("--epochs", epochs);
    app.add_option("--z", z, "number of exemplars")->check(CLI::PositiveNumber);
    app.add_option("--z-e", z_e, "nearest exemplars kept per point (enables NCE)")->check(CLI::PositiveNumber);
    app.add_option("--z-n", z_n, "sampled non-neighbor exemplars per point");
    app.add_option("--k-e", k_e, "weight of the sampled normalizer terms")->check(CLI::NonNegativeNumber);
    app.add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);
    app.add_option("--momentum", momentum)->check(CLI::Range(0.0, 0.999999));
    app.add_option("--grad-clip", grad_clip)->check(CLI::PositiveNumber);
    app.add_option("--seed", seed);
    app.add_option("--F", factors, "high-order factors")->check(CLI::PositiveNumber);
    app.add_option("--m", hidden_units, "high-order hidden units")->check(CLI::PositiveNumber);
    app.add_option("--O", order, "interaction order")->check(CLI::PositiveNumber);
    app.add_option("--hidden-layers", hidden_layers, "feedforward hidden sizes, e.g. 500,500,2000");
    app.add_option("--activation", activation)->check(CLI::IsMember({"relu", "logistic", "identity"}));
    app.add_option("--seeding", seeding)->check(CLI::IsMember({"careful", "random"}));
    app.add_option("--kmeans-iters", kmeans_iters);
    app.add_option("--data", data, "training data: CSV path or idx:IMAGES,LABELS")->check(kDataSource);
    app.add_option("--test-data", test_data, "test data: CSV path or idx:IMAGES,LABELS")->check(kDataSource);
    app.add_option("--label-column", label_column, "CSV label column name");
    app.add_option("--train-rows", train_rows, "use only the first N training rows");
    app.add_option("--test-rows", test_rows, "use only the first N test rows");
  }

  void apply(TrainConfig& c) const {
    if (method) c.method = parse_method(*method);
    if (activation) c.activation = parse_activation(*activation);
    if (seeding) c.seeding = parse_seeding(*seeding);
    if (data) c.data = *data;
    if (test_data) c.test_data = *test_data;
    if (label_column) c.label_column = *label_column;
    if (hidden_layers) c.hidden_layers = parse_counts(*hidden_layers, "--hidden-layers");
    if (perplexity) c.perplexity = *perplexity;
    if (lr) c.learning_rate = *lr;
    if (momentum) c.momentum = *momentum;
    if (k_e) c.K_e = *k_e;
    if (grad_clip) c.grad_clip = *grad_clip;
    if (batch_size) c.batch_size = *batch_size;
    if (epochs) c.epochs = *epochs;
    if (z) c.z = *z;
    if (z_e) c.z_e = *z_e;
    if (z_n) c.z_n = *z_n;
    if (factors) c.factors = *factors;
    if (hidden_units) c.hidden_units = *hidden_units;
    if (kmeans_iters) c.kmeans_iters = *kmeans_iters;
    if (train_rows) c.train_rows = *train_rows;
    if (test_rows) c.test_rows = *test_rows;
    if (order) c.order = *order;
    if (seed) c.seed = *seed;
  }
};

Dataset load_limited(const std::string& source, const std::optional<std::string>& label_column, std::size_t rows) {
  Dataset d = load_data_source(source, label_column);
  if (rows > 0) d = d.head(static_cast<Index>(rows));
  return d;
}

TrainConfig resolve_config(const std::optional<std::string>& path, const TrainOverrides& overrides) {
  TrainConfig cfg = path ? load_config(*path) : TrainConfig{};
  overrides.apply(cfg);
  if (cfg.data.empty()) throw ParameterError("no training data: set \"data\" in the config or pass --data");
  if (const auto msg = validate_data_source(cfg.data); !msg.empty()) throw ParameterError(msg);
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parametric exemplar-centered embedding toolkit", "ptsee"};
  app.require_subcommand(1);

  // exemplars
  auto* ex_cmd = app.add_subcommand("exemplars", "select exemplars by seeded k-means");
  std::string ex_data, ex_out, ex_seeding = "careful";
  std::optional<std::string> ex_label;
  std::size_t ex_z = 0, ex_iters = 10;
  std::uint64_t ex_seed = 0;
  ex_cmd->add_option("--data", ex_data, "CSV path or idx:IMAGES,LABELS")->required()->check(kDataSource);
  ex_cmd->add_option("--label-column", ex_label);
  ex_cmd->add_option("--z", ex_z, "number of exemplars")->required()->check(CLI::PositiveNumber);
  ex_cmd->add_option("--seeding", ex_seeding)->check(CLI::IsMember({"careful", "random"}));
  ex_cmd->add_option("--iters", ex_iters, "Lloyd iterations");
  ex_cmd->add_option("--seed", ex_seed);
  ex_cmd->add_option("--out", ex_out, "exemplar CSV")->required()->check(kWritable);

  // train
  auto* tr_cmd = app.add_subcommand("train", "train an embedding model");
  std::optional<std::string> tr_config, tr_trace, tr_exemplars;
  std::string tr_ckpt;
  TrainOverrides tr_over;
  tr_cmd->add_option("--config", tr_config, "flat JSON config")->check(CLI::ExistingFile);
  tr_over.attach(*tr_cmd);
  tr_cmd->add_option("--out-checkpoint", tr_ckpt)->required()->check(kWritable);
  tr_cmd->add_option("--out-trace", tr_trace, "CSV epoch,loss,seconds")->check(kWritable);
  tr_cmd->add_option("--out-exemplars", tr_exemplars, "exemplar CSV (exemplar methods)")->check(kWritable);

  // embed
  auto* em_cmd = app.add_subcommand("embed", "embed data with a trained checkpoint");
  std::string em_ckpt, em_data, em_out;
  std::optional<std::string> em_label;
  em_cmd->add_option("--checkpoint", em_ckpt)->required()->check(CLI::ExistingFile);
  em_cmd->add_option("--data", em_data)->required()->check(kDataSource);
  em_cmd->add_option("--label-column", em_label);
  em_cmd->add_option("--out", em_out)->required()->check(kWritable);

  // eval
  auto* ev_cmd = app.add_subcommand("eval", "kNN error and quality score of embeddings");
  std::string ev_train, ev_test, ev_knn = "1", ev_klist = "10";
  std::optional<std::string> ev_high, ev_high_ref, ev_label, ev_out;
  bool ev_quality = false;
  ev_cmd->add_option("--train-emb", ev_train)->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--test-emb", ev_test)->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--knn", ev_knn, "k values, e.g. 1,3,5");
  ev_cmd->add_flag("--quality", ev_quality, "also compute the neighborhood quality score");
  ev_cmd->add_option("--high-data", ev_high, "high-dimensional rows aligned with --test-emb")->check(kDataSource);
  ev_cmd->add_option("--high-ref", ev_high_ref, "high-dimensional rows aligned with --train-emb")->check(kDataSource);
  ev_cmd->add_option("--k-list", ev_klist, "quality neighborhood sizes");
  ev_cmd->add_option("--label-column", ev_label);
  ev_cmd->add_option("--out", ev_out, "metrics CSV (default: stdout)")->check(kWritable);

  // plot
  auto* pl_cmd = app.add_subcommand("plot", "SVG scatter plot of a 2-D embedding");
  std::string pl_emb, pl_out;
  pl_cmd->add_option("--embedding", pl_emb)->required()->check(CLI::ExistingFile);
  pl_cmd->add_option("--out", pl_out)->required()->check(kWritable);

  // sweep
  auto* sw_cmd = app.add_subcommand("sweep", "one-knob sensitivity sweep");
  std::string sw_config, sw_vary, sw_out;
  std::size_t sw_k = 1;
  TrainOverrides sw_over;
  sw_cmd->add_option("--config", sw_config)->required()->check(CLI::ExistingFile);
  sw_over.attach(*sw_cmd);
  sw_cmd->add_option("--vary", sw_vary, "batch_size=100,500,1000 or perplexity=3,10,20")->required();
  sw_cmd->add_option("--k", sw_k, "kNN neighborhood for the test error")->check(CLI::PositiveNumber);
  sw_cmd->add_option("--out", sw_out)->required()->check(kWritable);

  // CLI11 expects argv order reversed.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // Argument-level checks that CLI11 cannot express.
  std::vector<std::size_t> knn_ks, quality_ks;
  std::pair<std::string, std::vector<std::string>> vary;
  try {
    if (ev_cmd->parsed()) {
      knn_ks = parse_counts(ev_knn, "--knn");
      quality_ks = parse_counts(ev_klist, "--k-list");
      if (ev_quality && (!ev_high || !ev_high_ref)) {
        throw CLI::ValidationError("--quality", "needs --high-data and --high-ref");
      }
    }
    if (sw_cmd->parsed()) vary = parse_vary(sw_vary);
    if (tr_cmd->parsed() && tr_over.hidden_layers) parse_counts(*tr_over.hidden_layers, "--hidden-layers");
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (ex_cmd->parsed()) {
      const Dataset data = load_data_source(ex_data, ex_label);
      const auto set = select_exemplars(data, ex_z, parse_seeding(ex_seeding), ex_iters, ex_seed);
      write_matrix_csv(set.exemplars, ex_out);
      out << "wrote " << set.size() << " exemplars to " << ex_out << "\n";
    } else if (tr_cmd->parsed()) {
      const TrainConfig cfg = resolve_config(tr_config, tr_over);
      const Dataset data = load_limited(cfg.data, cfg.label_column, cfg.train_rows);
      cfg.validate(static_cast<std::size_t>(data.size()));
      TrainResult result = train(data, cfg);
      save_checkpoint(result.checkpoint, tr_ckpt);
      result.trace.checkpoint_path = tr_ckpt;
      if (tr_trace) write_trace_csv(result.trace, *tr_trace);
      if (tr_exemplars && result.exemplars) write_matrix_csv(result.exemplars->exemplars, *tr_exemplars);
      out << "trained " << to_string(cfg.method) << " for " << cfg.epochs << " epochs";
      if (!result.trace.epoch_loss.empty()) out << ", final loss " << result.trace.epoch_loss.back();
      out << "\n";
    } else if (em_cmd->parsed()) {
      const Checkpoint ckpt = load_checkpoint(em_ckpt);
      const Dataset data = load_data_source(em_data, em_label);
      const EmbeddingResult emb = embed(ckpt.model, data, ckpt.method);
      write_embedding(emb, em_out);
      out << "embedded " << data.size() << " rows to " << em_out << "\n";
    } else if (ev_cmd->parsed()) {
      const EmbeddingResult train_emb = read_embedding(ev_train);
      const EmbeddingResult test_emb = read_embedding(ev_test);
      std::vector<MetricRow> rows;
      for (auto k : knn_ks) {
        rows.push_back({metric_name_knn(k), k, "test", knn_error(train_emb, test_emb, k).error_rate});
        rows.push_back({metric_name_knn(k), k, "train", knn_train_error(train_emb, k).error_rate});
      }
      if (ev_quality) {
        const Dataset high = load_data_source(*ev_high, ev_label);
        const Dataset ref = load_data_source(*ev_high_ref, ev_label);
        for (auto k : quality_ks) {
          rows.push_back({"quality", k, "test", quality_score(high, test_emb, ref, train_emb, k).score});
        }
      }
      if (ev_out) {
        write_metrics_csv(rows, *ev_out);
      } else {
        out << "metric,k,split,value\n";
        for (const auto& r : rows) out << r.metric << "," << r.k << "," << r.split << "," << format_double(r.value) << "\n";
      }
    } else if (pl_cmd->parsed()) {
      plot_svg(read_embedding(pl_emb), pl_out);
      out << "wrote " << pl_out << "\n";
    } else if (sw_cmd->parsed()) {
      TrainConfig cfg = load_config(sw_config);
      sw_over.apply(cfg);
      if (cfg.data.empty() || cfg.test_data.empty()) {
        throw ParameterError("sweep needs both \"data\" and \"test_data\"");
      }
      for (const auto& src : {cfg.data, cfg.test_data}) {
        if (const auto msg = validate_data_source(src); !msg.empty()) throw ParameterError(msg);
      }
      const Dataset train_data = load_limited(cfg.data, cfg.label_column, cfg.train_rows);
      const Dataset test_data = load_limited(cfg.test_data, cfg.label_column, cfg.test_rows);
      const SweepReport report = run_sweep(cfg, vary.first, vary.second, train_data, test_data, sw_k);
      write_sweep_csv(report, sw_out);
      out << "swept " << vary.first << " over " << report.rows.size() << " settings; error spread "
          << report.error_spread() << "\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace ptsee::cli
