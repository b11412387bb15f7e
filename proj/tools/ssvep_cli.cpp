// Command-line front end: synthetic dataset generation, model training,
// protocol evaluation, gradient checking, and feature dumps.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3
// runtime/numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssvep/dataset.hpp"
#include "ssvep/eval.hpp"
#include "ssvep/lda.hpp"
#include "ssvep/nn.hpp"
#include "ssvep/proposed.hpp"
#include "ssvep/spectral.hpp"
#include "ssvep/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool g_quiet = false;

void log_line(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << "\n";
}

ssvep::EpochDataset load_montage_dataset(const fs::path& root,
                                         const std::string& montage) {
  if (fs::exists(root / montage / "manifest.json"))
    return ssvep::load_dataset(root / montage);
  if (fs::exists(root / "manifest.json")) return ssvep::load_dataset(root);
  throw std::runtime_error("no dataset found under " + root.string());
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              uint64_t seed, bool seed_given) {
  ssvep::GenConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = ssvep::GenConfig::from_json(ss.str());
    }
    if (seed_given) cfg.master_seed = seed;
  } catch (const std::exception& e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return 2;
  }

  try {
    const ssvep::SyntheticDataset ds = ssvep::gen_dataset(cfg);
    const fs::path out(out_dir);
    ssvep::save_dataset(ds.scalp, out / "scalp");
    ssvep::save_dataset(ds.ear, out / "ear");

    json top;
    top["config"] = json::parse(cfg.to_json());
    top["montages"] = {"scalp", "ear"};
    top["trial_pairs"] = ds.scalp.epochs.size();
    std::ofstream mf(out / "manifest.json");
    if (!mf) throw std::runtime_error("cannot write top-level manifest");
    mf << top.dump(2) << "\n";

    std::cout << "wrote " << ds.scalp.epochs.size() << " trial pairs ("
              << cfg.n_subjects << " subjects x 3 conditions x "
              << cfg.trials_per_class * 3 << " trials) to " << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_train(const std::string& data_dir, const std::string& method,
              const std::string& montage, const std::string& condition,
              int subject, const std::string& model_out, uint64_t seed) {
  try {
    const ssvep::EpochDataset ds = load_montage_dataset(data_dir, montage);
    const ssvep::Condition cond = ssvep::condition_from_string(condition);
    std::vector<const ssvep::Epoch*> slice;
    if (subject > 0) {
      slice = ds.slice(subject, cond);
    } else {
      for (const int s : ds.subject_ids())
        for (const ssvep::Epoch* e : ds.slice(s, cond)) slice.push_back(e);
    }
    if (slice.empty()) {
      std::cerr << "error: no trials for the requested slice\n";
      return 2;
    }

    if (method == "lda") {
      std::vector<double> freqs = {60.0 / 11.0, 60.0 / 7.0, 60.0 / 5.0};
      const int d = static_cast<int>(
          ssvep::lda_band_features(*slice.front()).size());
      Eigen::MatrixXd feats(slice.size(), d);
      std::vector<int> labels(slice.size());
      for (size_t i = 0; i < slice.size(); ++i) {
        feats.row(static_cast<int>(i)) =
            ssvep::lda_band_features(*slice[i]).transpose();
        labels[i] = slice[i]->label;
      }
      const ssvep::LdaModel model = ssvep::lda_fit(feats, labels, 3);
      model.save(model_out);
      log_line("wrote LDA model to " + model_out);
      return 0;
    }
    if (method == "proposed") {
      ssvep::TrainConfig tc;
      tc.rng_seed = seed;
      try {
        const ssvep::ProposedModel model = ssvep::ProposedModel::fit(slice, tc);
        model.save(model_out);
        const fs::path curve = fs::path(model_out).string() + ".loss.csv";
        std::ofstream cf(curve);
        cf << "epoch,loss\n";
        cf.precision(17);
        for (size_t i = 0; i < model.loss_curve().size(); ++i)
          cf << i + 1 << "," << model.loss_curve()[i] << "\n";
        log_line("wrote model to " + model_out + " and loss curve to " +
                 curve.string());
      } catch (const ssvep::DivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
      }
      return 0;
    }
    std::cerr << "error: unknown method " << method << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_eval(const std::string& data_dir, const std::string& protocol,
             const std::vector<std::string>& methods,
             const std::vector<std::string>& montages,
             const std::vector<std::string>& speeds, const std::string& out_dir,
             uint64_t seed, int jobs) {
  try {
    const bool s2s = protocol == "session-to-session";
    if (!s2s && protocol != "session-dependent") {
      std::cerr << "error: unknown protocol " << protocol << "\n";
      return 2;
    }
    std::vector<ssvep::Method> ms;
    for (const auto& m : methods) ms.push_back(ssvep::method_from_string(m));
    std::vector<ssvep::Condition> cs;
    for (const auto& s : speeds) {
      const ssvep::Condition c = ssvep::condition_from_string(s);
      if (s2s && c == ssvep::Condition::Standing) {
        std::cerr << "error: standing is not a valid session-to-session test "
                     "condition\n";
        return 2;
      }
      cs.push_back(c);
    }

    fs::create_directories(out_dir);
    json stats = json::object();
    for (const std::string& montage : montages) {
      const ssvep::EpochDataset ds = load_montage_dataset(data_dir, montage);
      ssvep::AccuracyTable table;
      for (const ssvep::Condition speed : cs) {
        for (const ssvep::Method method : ms) {
          ssvep::ProtocolSpec spec;
          spec.kind = s2s ? ssvep::ProtocolKind::SessionToSession
                          : ssvep::ProtocolKind::SessionDependent;
          spec.speed = speed;
          spec.method = method;
          spec.seed = seed;
          spec.jobs = jobs;
          log_line("running " + protocol + " " + montage + " " +
                   ssvep::to_string(speed) + " " + ssvep::to_string(method));
          const std::vector<double> acc =
              s2s ? ssvep::run_session_to_session(ds, spec)
                  : ssvep::run_session_dependent(ds, spec);
          table.add(speed, method, acc);
        }
      }
      const std::string md = ssvep::emit_table_markdown(table);
      std::cout << "## " << montage << "\n" << md << "\n";
      {
        std::ofstream f(fs::path(out_dir) / ("table_" + montage + ".md"));
        f << md;
      }
      {
        std::ofstream f(fs::path(out_dir) / ("table_" + montage + ".csv"));
        f << ssvep::emit_table_csv(table);
      }
      stats[montage] = json::parse(ssvep::stats_json(table));
    }
    {
      std::ofstream f(fs::path(out_dir) / "stats.json");
      f << stats.dump(2) << "\n";
    }
    {
      json rc;
      rc["protocol"] = protocol;
      rc["methods"] = methods;
      rc["montages"] = montages;
      rc["speeds"] = speeds;
      rc["seed"] = seed;
      rc["jobs"] = jobs;
      rc["data"] = data_dir;
      std::ofstream f(fs::path(out_dir) / "run_config.json");
      f << rc.dump(2) << "\n";
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_gradcheck(uint64_t seed, int n_seeds, const std::string& corrupt) {
  // Small geometry keeps the finite-difference sweep fast while covering
  // every layer type.
  ssvep::NetConfig cfg;
  cfg.channels = 2;
  cfg.freq_bins = 8;
  cfg.time_steps = 10;
  cfg.spatial_kernels = 4;
  cfg.conv_kernel_len = 3;
  cfg.conv_stride = 2;
  cfg.conv1_maps = 3;
  cfg.conv2_maps = 3;
  cfg.dense_units = 4;
  cfg.lstm_hidden = 3;

  constexpr double kTol = 1e-4;
  std::map<std::string, double> worst;
  for (int s = 0; s < n_seeds; ++s) {
    const auto report =
        ssvep::gradient_check(cfg, seed + static_cast<uint64_t>(s), 1e-5, corrupt);
    for (const auto& [name, err] : report)
      worst[name] = std::max(worst[name], err);
  }

  bool ok = true;
  std::string first_fail;
  for (const auto& [name, err] : worst) {
    const bool pass = err < kTol;
    if (!pass && first_fail.empty()) first_fail = name;
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " max_rel_err=" << err
              << "\n";
  }
  if (!ok) {
    std::cerr << "gradient check failed at " << first_fail << "\n";
    return 1;
  }
  return 0;
}

int cmd_features_dump(const std::string& data_dir, const std::string& montage,
                      int index, const std::string& out_path) {
  try {
    const ssvep::EpochDataset ds = load_montage_dataset(data_dir, montage);
    if (index < 0 || index >= static_cast<int>(ds.epochs.size())) {
      std::cerr << "error: epoch index out of range\n";
      return 2;
    }
    const ssvep::SpectralFeatures sf = ssvep::magnitude_features(
        ds.epochs[index], ssvep::ProposedModel::kBandLoHz,
        ssvep::ProposedModel::kBandHiHz);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
      }
      out = &file;
    }
    out->precision(17);
    *out << "channel";
    for (const double f : sf.bin_freqs) *out << "," << f;
    *out << "\n";
    const auto& labels = ssvep::Montage::get(ds.montage).channels();
    for (int c = 0; c < sf.matrix.rows(); ++c) {
      *out << labels[c];
      for (int b = 0; b < sf.matrix.cols(); ++b) *out << "," << sf.matrix(c, b);
      *out << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSVEP ambulatory-EEG decoding toolkit"};
  app.require_subcommand(1);
  uint64_t seed = 1;
  app.add_option("--seed", seed, "Master random seed")->capture_default_str();
  app.add_flag("--quiet", g_quiet, "Suppress log output on stderr");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_config, synth_out;
  synth->add_option("--config", synth_config, "GenConfig JSON file");
  synth->add_option("--out", synth_out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a model on one slice");
  std::string train_data, train_method, train_montage = "scalp",
              train_condition = "standing", train_out;
  int train_subject = 0;
  train->add_option("--data", train_data, "Dataset directory")->required();
  train->add_option("--method", train_method, "lda or proposed")->required();
  train->add_option("--montage", train_montage, "scalp or ear")
      ->capture_default_str();
  train->add_option("--condition", train_condition,
                    "standing, walk08 or walk16")
      ->capture_default_str();
  train->add_option("--subject", train_subject,
                    "Subject id (0 = pool all subjects)")
      ->capture_default_str();
  train->add_option("--out", train_out, "Model output path")->required();

  auto* eval = app.add_subcommand("eval", "Run an evaluation protocol");
  std::string eval_data, eval_protocol = "session-dependent", eval_out;
  std::vector<std::string> eval_methods = {"cca", "lda", "proposed"};
  std::vector<std::string> eval_montages = {"scalp", "ear"};
  std::vector<std::string> eval_speeds = {"standing", "walk08", "walk16"};
  int jobs = 1;
  eval->add_option("--data", eval_data, "Dataset directory")->required();
  eval->add_option("--protocol", eval_protocol,
                   "session-dependent or session-to-session")
      ->capture_default_str();
  eval->add_option("--methods", eval_methods, "Methods to evaluate")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--montages", eval_montages, "Montages to evaluate")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--speeds", eval_speeds, "Speeds to evaluate")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Report output directory")->required();
  eval->add_option("--jobs", jobs, "Worker threads over subjects")
      ->capture_default_str();

  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  int gc_seeds = 10;
  std::string gc_corrupt;
  gradcheck->add_option("--seeds", gc_seeds, "Number of random seeds")
      ->capture_default_str();
  gradcheck
      ->add_option("--corrupt", gc_corrupt,
                   "Test hook: perturb this tensor's analytic gradient")
      ->group("");

  auto* fdump = app.add_subcommand("features-dump",
                                   "Dump one epoch's spectral features as CSV");
  std::string fd_data, fd_montage = "scalp", fd_out;
  int fd_index = 0;
  fdump->add_option("--data", fd_data, "Dataset directory")->required();
  fdump->add_option("--montage", fd_montage, "scalp or ear")
      ->capture_default_str();
  fdump->add_option("--index", fd_index, "Epoch index")->capture_default_str();
  fdump->add_option("--out", fd_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (synth->parsed())
    return cmd_synth(synth_config, synth_out, seed, app.count("--seed") > 0);
  if (train->parsed())
    return cmd_train(train_data, train_method, train_montage, train_condition,
                     train_subject, train_out, seed);
  if (eval->parsed())
    return cmd_eval(eval_data, eval_protocol, eval_methods, eval_montages,
                    eval_speeds, eval_out, seed, jobs);
  if (gradcheck->parsed()) return cmd_gradcheck(seed, gc_seeds, gc_corrupt);
  if (fdump->parsed())
    return cmd_features_dump(fd_data, fd_montage, fd_index, fd_out);
  return 2;
}
