#ifndef SSVEP_EVAL_HPP
#define SSVEP_EVAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssvep/dataset.hpp"
#include "ssvep/nn.hpp"
#include "ssvep/stats.hpp"

namespace ssvep {

enum class Method { CCA, LDA, Proposed };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class ProtocolKind { SessionDependent, SessionToSession };

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::SessionDependent;
  int k_folds = 5;
  Condition speed = Condition::Standing;
  Method method = Method::CCA;
  uint64_t seed = 0;
  std::vector<double> stimulus_hz = {60.0 / 11.0, 60.0 / 7.0, 60.0 / 5.0};
  TrainConfig train;  // hyperparameters for the proposed method
  int jobs = 1;       // worker threads over subjects; results independent of it
};

// Stratified k-fold split: per-class round-robin assignment after a seeded
// shuffle; returns (train, test) index pairs into the input order.
std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(
    const std::vector<int>& labels, int k, uint64_t seed);

// Session-dependent: k-fold CV within (subject, speed); accuracy pooled over
// folds. Returns one accuracy per subject, in subject order.
std::vector<double> run_session_dependent(const EpochDataset& ds,
                                          const ProtocolSpec& spec);

// Session-to-session: train on Standing, test on spec.speed (a walking
// condition).
std::vector<double> run_session_to_session(const EpochDataset& ds,
                                           const ProtocolSpec& spec);

struct AccuracyRow {
  Condition speed;
  Method method;
  bool training_free = false;   // CCA ignores training folds
  std::vector<double> per_subject;
  double mean = 0.0;
  double sd = 0.0;
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;
  void add(Condition speed, Method method, std::vector<double> accuracies);
  const AccuracyRow* find(Condition speed, Method method) const;
};

std::string emit_table_markdown(const AccuracyTable& table);
std::string emit_table_csv(const AccuracyTable& table);
AccuracyTable parse_table_csv(const std::string& text);

// All pairwise method t-tests per speed, serialized as JSON.
std::string stats_json(const AccuracyTable& table);

}  // namespace ssvep

#endif  // SSVEP_EVAL_HPP
