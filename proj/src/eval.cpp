#include "ssvep/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "ssvep/cca.hpp"
#include "ssvep/lda.hpp"
#include "ssvep/proposed.hpp"
#include "ssvep/rng.hpp"

namespace ssvep {

namespace {

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  int correct = 0;
  for (size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == labels[i]) ++correct;
  return preds.empty() ? 0.0 : static_cast<double>(correct) / preds.size();
}

// Train on `train`, classify `test`; uniform front-end for the three methods.
std::vector<int> train_and_classify(const std::vector<const Epoch*>& train,
                                    const std::vector<const Epoch*>& test,
                                    const ProtocolSpec& spec,
                                    uint64_t run_seed) {
  std::vector<int> preds;
  preds.reserve(test.size());
  switch (spec.method) {
    case Method::CCA: {
      const Epoch& first = *test.front();
      const ReferenceBank bank = build_references(
          spec.stimulus_hz, 2, first.num_samples(), first.rate);
      for (const Epoch* e : test) preds.push_back(cca_classify(*e, bank).label);
      break;
    }
    case Method::LDA: {
      const int d = static_cast<int>(
          lda_band_features(*train.front()).size());
      Eigen::MatrixXd feats(train.size(), d);
      std::vector<int> labels(train.size());
      for (size_t i = 0; i < train.size(); ++i) {
        feats.row(static_cast<int>(i)) =
            lda_band_features(*train[i]).transpose();
        labels[i] = train[i]->label;
      }
      const LdaModel model = lda_fit(feats, labels, 3);
      for (const Epoch* e : test)
        preds.push_back(lda_predict(model, lda_band_features(*e)));
      break;
    }
    case Method::Proposed: {
      TrainConfig tc = spec.train;
      tc.rng_seed = run_seed;
      const ProposedModel model = ProposedModel::fit(train, tc);
      for (const Epoch* e : test) preds.push_back(model.predict(*e));
      break;
    }
  }
  return preds;
}

void check_disjoint(const std::vector<int>& train, const std::vector<int>& test) {
  for (const int t : test)
    if (std::find(train.begin(), train.end(), t) != train.end())
      throw std::logic_error("train and test folds overlap");
}

// Deterministic subject-parallel map; results are independent of the worker
// count because each subject owns its seed-derived streams.
std::vector<double> for_each_subject(
    const std::vector<int>& subjects, int jobs,
    const std::function<double(int)>& fn) {
  std::vector<double> out(subjects.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < subjects.size(); ++i) out[i] = fn(subjects[i]);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < subjects.size();
         i = next.fetch_add(1)) {
      try {
        out[i] = fn(subjects[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::CCA: return "CCA";
    case Method::LDA: return "LDA";
    case Method::Proposed: return "Proposed";
  }
  return "CCA";
}

Method method_from_string(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  if (lower == "cca") return Method::CCA;
  if (lower == "lda") return Method::LDA;
  if (lower == "proposed") return Method::Proposed;
  throw std::invalid_argument("unknown method: " + s);
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(
    const std::vector<int>& labels, int k, uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (k < 2 || k > n)
    throw std::invalid_argument("kfold_split: need 2 <= k <= n");

  std::map<int, std::vector<int>> by_class;
  for (int i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, idx] : by_class)
    if (static_cast<int>(idx.size()) < k)
      throw std::invalid_argument(
          "kfold_split: class " + std::to_string(cls) + " has fewer than " +
          std::to_string(k) + " trials");

  std::vector<std::vector<int>> folds(k);
  for (auto& [cls, idx] : by_class) {
    Rng rng(Rng::derive(seed, "kfold", static_cast<uint64_t>(cls)));
    for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
      std::swap(idx[i], idx[static_cast<int>(rng.below(i + 1))]);
    for (size_t i = 0; i < idx.size(); ++i)
      folds[i % k].push_back(idx[i]);
  }

  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  for (int f = 0; f < k; ++f) {
    std::vector<int> test = folds[f];
    std::sort(test.begin(), test.end());
    std::vector<int> train;
    for (int g = 0; g < k; ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());
    out.emplace_back(std::move(train), std::move(test));
  }
  return out;
}

std::vector<double> run_session_dependent(const EpochDataset& ds,
                                          const ProtocolSpec& spec) {
  if (spec.k_folds < 2)
    throw std::invalid_argument("session-dependent protocol needs k_folds >= 2");
  const std::vector<int> subjects = ds.subject_ids();
  if (subjects.empty()) throw std::invalid_argument("dataset has no subjects");

  return for_each_subject(subjects, spec.jobs, [&](int subject) {
    const std::vector<const Epoch*> trials = ds.slice(subject, spec.speed);
    if (trials.empty())
      throw std::invalid_argument("dataset has no trials for subject " +
                                  std::to_string(subject) + " in condition " +
                                  to_string(spec.speed));
    std::vector<int> labels(trials.size());
    for (size_t i = 0; i < trials.size(); ++i) labels[i] = trials[i]->label;

    const auto folds = kfold_split(
        labels, spec.k_folds,
        Rng::derive(spec.seed, "session-dependent", subject));
    int correct = 0, total = 0;
    int fold_id = 0;
    for (const auto& [train_idx, test_idx] : folds) {
      check_disjoint(train_idx, test_idx);
      std::vector<const Epoch*> train, test;
      for (const int i : train_idx) train.push_back(trials[i]);
      for (const int i : test_idx) test.push_back(trials[i]);
      const std::vector<int> preds = train_and_classify(
          train, test, spec,
          Rng::derive(spec.seed, "proposed-train", subject, fold_id));
      for (size_t i = 0; i < test.size(); ++i)
        if (preds[i] == test[i]->label) ++correct;
      total += static_cast<int>(test.size());
      ++fold_id;
    }
    return static_cast<double>(correct) / total;
  });
}

std::vector<double> run_session_to_session(const EpochDataset& ds,
                                           const ProtocolSpec& spec) {
  if (spec.speed == Condition::Standing)
    throw std::invalid_argument(
        "session-to-session requires a walking test condition");
  const std::vector<int> subjects = ds.subject_ids();
  if (subjects.empty()) throw std::invalid_argument("dataset has no subjects");

  return for_each_subject(subjects, spec.jobs, [&](int subject) {
    const std::vector<const Epoch*> train = ds.slice(subject, Condition::Standing);
    const std::vector<const Epoch*> test = ds.slice(subject, spec.speed);
    if (train.empty() || test.empty())
      throw std::invalid_argument(
          "dataset is missing the training or test condition for subject " +
          std::to_string(subject));
    const std::vector<int> preds = train_and_classify(
        train, test, spec,
        Rng::derive(spec.seed, "proposed-train-s2s", subject,
                    static_cast<uint64_t>(spec.speed)));
    std::vector<int> labels(test.size());
    for (size_t i = 0; i < test.size(); ++i) labels[i] = test[i]->label;
    return accuracy(preds, labels);
  });
}

void AccuracyTable::add(Condition speed, Method method,
                        std::vector<double> accuracies) {
  AccuracyRow row;
  row.speed = speed;
  row.method = method;
  row.training_free = method == Method::CCA;
  row.per_subject = std::move(accuracies);
  const int n = static_cast<int>(row.per_subject.size());
  for (const double a : row.per_subject) {
    if (a < 0.0 || a > 1.0)
      throw std::invalid_argument("accuracy outside [0,1]");
    row.mean += a;
  }
  row.mean /= n;
  double var = 0.0;
  for (const double a : row.per_subject) var += (a - row.mean) * (a - row.mean);
  row.sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  rows.push_back(std::move(row));
}

const AccuracyRow* AccuracyTable::find(Condition speed, Method method) const {
  for (const AccuracyRow& row : rows)
    if (row.speed == speed && row.method == method) return &row;
  return nullptr;
}

namespace {

std::string speed_label(Condition c) {
  switch (c) {
    case Condition::Standing: return "Standing";
    case Condition::Walk08: return "0.8m/s";
    case Condition::Walk16: return "1.6m/s";
  }
  return "Standing";
}

Condition speed_from_label(const std::string& s) {
  if (s == "Standing") return Condition::Standing;
  if (s == "0.8m/s") return Condition::Walk08;
  if (s == "1.6m/s") return Condition::Walk16;
  throw std::invalid_argument("unknown speed label: " + s);
}

// Table I row order: speeds outer, methods inner.
std::vector<const AccuracyRow*> ordered_rows(const AccuracyTable& table) {
  std::vector<const AccuracyRow*> out;
  for (const Condition speed :
       {Condition::Standing, Condition::Walk08, Condition::Walk16})
    for (const Method m : {Method::CCA, Method::LDA, Method::Proposed})
      if (const AccuracyRow* row = table.find(speed, m)) out.push_back(row);
  for (const AccuracyRow& row : table.rows) {
    if (std::find(out.begin(), out.end(), &row) == out.end())
      throw std::logic_error("table row outside the canonical ordering");
  }
  return out;
}

std::string format_full(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string emit_table_markdown(const AccuracyTable& table) {
  const auto rows = ordered_rows(table);
  if (rows.empty()) throw std::logic_error("emit_table: empty table");
  const int n = static_cast<int>(rows.front()->per_subject.size());
  std::ostringstream os;
  os << "| Speed | Method |";
  for (int i = 1; i <= n; ++i) os << " S" << i << " |";
  os << " Average | SD |\n|";
  for (int i = 0; i < n + 4; ++i) os << "---|";
  os << "\n";
  os.setf(std::ios::fixed);
  os.precision(2);
  for (const AccuracyRow* row : rows) {
    if (static_cast<int>(row->per_subject.size()) != n)
      throw std::logic_error("emit_table: ragged table");
    os << "| " << speed_label(row->speed) << " | " << to_string(row->method)
       << (row->training_free ? " (training-free)" : "") << " |";
    for (const double a : row->per_subject) os << " " << a << " |";
    os << " " << row->mean << " | " << row->sd << " |\n";
  }
  return os.str();
}

std::string emit_table_csv(const AccuracyTable& table) {
  const auto rows = ordered_rows(table);
  if (rows.empty()) throw std::logic_error("emit_table: empty table");
  const int n = static_cast<int>(rows.front()->per_subject.size());
  std::ostringstream os;
  os << "Speed,Method";
  for (int i = 1; i <= n; ++i) os << ",S" << i;
  os << ",Average,SD\n";
  for (const AccuracyRow* row : rows) {
    os << speed_label(row->speed) << "," << to_string(row->method);
    for (const double a : row->per_subject) os << "," << format_full(a);
    os << "," << format_full(row->mean) << "," << format_full(row->sd) << "\n";
  }
  return os.str();
}

AccuracyTable parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  AccuracyTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5) throw std::invalid_argument("short CSV row");
    std::vector<double> accs;
    for (size_t i = 2; i + 2 < cells.size(); ++i)
      accs.push_back(std::stod(cells[i]));
    table.add(speed_from_label(cells[0]), method_from_string(cells[1]),
              std::move(accs));
  }
  return table;
}

std::string stats_json(const AccuracyTable& table) {
  nlohmann::json out = nlohmann::json::array();
  for (const Condition speed :
       {Condition::Standing, Condition::Walk08, Condition::Walk16}) {
    const std::vector<Method> methods = {Method::CCA, Method::LDA,
                                         Method::Proposed};
    for (size_t i = 0; i < methods.size(); ++i) {
      for (size_t j = i + 1; j < methods.size(); ++j) {
        const AccuracyRow* a = table.find(speed, methods[i]);
        const AccuracyRow* b = table.find(speed, methods[j]);
        if (!a || !b) continue;
        if (a->per_subject.size() < 2) continue;  // t-test needs n >= 2
        const TTestResult t = paired_ttest(a->per_subject, b->per_subject);
        out.push_back({{"speed", speed_label(speed)},
                       {"method_a", to_string(methods[i])},
                       {"method_b", to_string(methods[j])},
                       {"t", t.t},
                       {"df", t.df},
                       {"p", t.p},
                       {"mean_diff", t.mean_diff},
                       {"degenerate", t.degenerate}});
      }
    }
  }
  return out.dump(2);
}

}  // namespace ssvep
