#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "ssvep/eval.hpp"
#include "ssvep/synthgen.hpp"

using namespace ssvep;

namespace {

GenConfig tiny_config(SnrPreset preset, uint64_t seed = 7) {
  GenConfig cfg;
  cfg.n_subjects = 2;
  cfg.trials_per_class = 5;
  cfg.preset = preset;
  cfg.master_seed = seed;
  return cfg;
}

std::vector<int> balanced_labels(int per_class) {
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per_class; ++i) labels.push_back(c);
  return labels;
}

}  // namespace

TEST_CASE("method and protocol names round trip") {
  for (Method m : {Method::CCA, Method::LDA, Method::Proposed})
    CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS((void)method_from_string("svm"), std::invalid_argument);
}

TEST_CASE("kfold split is a stratified partition") {
  const std::vector<int> labels = balanced_labels(30);  // 90 trials
  auto folds = kfold_split(labels, 5, 11);
  REQUIRE(folds.size() == 5);

  std::vector<int> seen(labels.size(), 0);
  for (const auto& [train, test] : folds) {
    CHECK(test.size() == 18);
    CHECK(train.size() == 72);
    int per_class[3] = {0, 0, 0};
    for (int idx : test) {
      ++seen[idx];
      ++per_class[labels[idx]];
    }
    for (int c = 0; c < 3; ++c) CHECK(per_class[c] == 6);
    // train and test are disjoint and cover everything
    std::set<int> all(train.begin(), train.end());
    for (int idx : test) CHECK_FALSE(all.count(idx));
    CHECK(all.size() + test.size() == labels.size());
  }
  for (int count : seen) CHECK(count == 1);  // each trial tested exactly once
}

TEST_CASE("kfold split is seed-deterministic and seed-sensitive") {
  const std::vector<int> labels = balanced_labels(10);
  auto a = kfold_split(labels, 5, 3);
  auto b = kfold_split(labels, 5, 3);
  auto c = kfold_split(labels, 5, 4);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("kfold split validates its arguments") {
  CHECK_THROWS_AS((void)kfold_split(balanced_labels(2), 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)kfold_split(balanced_labels(1), 5, 0),
                  std::invalid_argument);  // fewer trials per class than folds
  CHECK_THROWS_AS((void)kfold_split({}, 5, 0), std::invalid_argument);
}

TEST_CASE("accuracy table computes mean and sample SD") {
  AccuracyTable table;
  table.add(Condition::Standing, Method::CCA, {0.8, 0.9, 1.0});
  const AccuracyRow* row = table.find(Condition::Standing, Method::CCA);
  REQUIRE(row != nullptr);
  CHECK(row->mean == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(row->sd == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(row->training_free);
  CHECK(table.find(Condition::Walk08, Method::CCA) == nullptr);
}

TEST_CASE("csv emission round trips through the parser") {
  AccuracyTable table;
  table.add(Condition::Standing, Method::CCA, {0.8, 0.9});
  table.add(Condition::Walk16, Method::LDA, {0.55, 0.6});
  table.add(Condition::Walk08, Method::Proposed, {0.7, 0.65});
  AccuracyTable back = parse_table_csv(emit_table_csv(table));
  REQUIRE(back.rows.size() == 3);
  for (const AccuracyRow& row : table.rows) {
    const AccuracyRow* r = back.find(row.speed, row.method);
    REQUIRE(r != nullptr);
    REQUIRE(r->per_subject.size() == row.per_subject.size());
    for (size_t i = 0; i < row.per_subject.size(); ++i)
      CHECK(r->per_subject[i] == doctest::Approx(row.per_subject[i]).epsilon(1e-9));
  }
}

TEST_CASE("markdown table mentions every row") {
  AccuracyTable table;
  table.add(Condition::Standing, Method::CCA, {1.0, 1.0});
  table.add(Condition::Walk16, Method::Proposed, {0.5, 0.6});
  const std::string md = emit_table_markdown(table);
  CHECK(md.find(to_string(Method::CCA)) != std::string::npos);
  CHECK(md.find(to_string(Method::Proposed)) != std::string::npos);
  CHECK(md.find("1.6m/s") != std::string::npos);
  CHECK(md.find("(training-free)") != std::string::npos);
}

TEST_CASE("stats json covers every method pair per speed") {
  AccuracyTable table;
  table.add(Condition::Standing, Method::CCA, {0.8, 0.9, 0.7});
  table.add(Condition::Standing, Method::LDA, {0.85, 0.95, 0.75});
  table.add(Condition::Standing, Method::Proposed, {0.9, 0.97, 0.8});
  table.add(Condition::Walk08, Method::CCA, {0.6, 0.7, 0.5});
  table.add(Condition::Walk08, Method::LDA, {0.65, 0.75, 0.55});
  const nlohmann::json j = nlohmann::json::parse(stats_json(table));
  REQUIRE(j.is_array());
  CHECK(j.size() == 4);  // 3 pairs for Standing, 1 for Walk08
  for (const auto& entry : j) {
    CHECK(entry.contains("speed"));
    CHECK(entry.contains("method_a"));
    CHECK(entry.contains("method_b"));
    CHECK(entry.contains("t"));
    CHECK(entry.contains("p"));
    CHECK(entry.contains("df"));
    CHECK(entry["df"].get<int>() == 2);
  }
}

TEST_CASE("stats json skips single-subject tables") {
  AccuracyTable table;
  table.add(Condition::Standing, Method::CCA, {0.8});
  table.add(Condition::Standing, Method::LDA, {0.9});
  const nlohmann::json j = nlohmann::json::parse(stats_json(table));
  CHECK(j.empty());
}

TEST_CASE("noiseless data scores 1.0 under every protocol and method") {
  SyntheticDataset ds = gen_dataset(tiny_config(SnrPreset::Noiseless));
  ProtocolSpec spec;
  spec.train.epochs = 8;  // enough for a separable noiseless problem
  for (Method m : {Method::CCA, Method::LDA}) {
    spec.method = m;
    spec.kind = ProtocolKind::SessionDependent;
    spec.speed = Condition::Standing;
    for (double acc : run_session_dependent(ds.ear, spec))
      CHECK(acc == doctest::Approx(1.0));
    spec.kind = ProtocolKind::SessionToSession;
    spec.speed = Condition::Walk16;
    for (double acc : run_session_to_session(ds.scalp, spec))
      CHECK(acc == doctest::Approx(1.0));
  }
}

TEST_CASE("session-dependent accuracies are seed-deterministic") {
  SyntheticDataset ds = gen_dataset(tiny_config(SnrPreset::Hard));
  ProtocolSpec spec;
  spec.method = Method::LDA;
  spec.speed = Condition::Walk08;
  spec.seed = 21;
  auto a = run_session_dependent(ds.ear, spec);
  auto b = run_session_dependent(ds.ear, spec);
  CHECK(a == b);
  CHECK(a.size() == 2);
  for (double acc : a) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
}

TEST_CASE("session-to-session rejects standing as the test condition") {
  SyntheticDataset ds = gen_dataset(tiny_config(SnrPreset::Noiseless));
  ProtocolSpec spec;
  spec.kind = ProtocolKind::SessionToSession;
  spec.method = Method::CCA;
  spec.speed = Condition::Standing;
  CHECK_THROWS_AS((void)run_session_to_session(ds.ear, spec),
                  std::invalid_argument);
}

TEST_CASE("proposed method runs end to end on a tiny dataset") {
  GenConfig cfg = tiny_config(SnrPreset::High);
  cfg.n_subjects = 1;
  SyntheticDataset ds = gen_dataset(cfg);
  ProtocolSpec spec;
  spec.method = Method::Proposed;
  spec.speed = Condition::Standing;
  spec.train.epochs = 2;  // smoke test, not a quality bar
  auto a = run_session_dependent(ds.ear, spec);
  auto b = run_session_dependent(ds.ear, spec);
  REQUIRE(a.size() == 1);
  CHECK(a == b);
  CHECK(a[0] >= 0.0);
  CHECK(a[0] <= 1.0);
}

TEST_CASE("jobs parameter does not change the result") {
  SyntheticDataset ds = gen_dataset(tiny_config(SnrPreset::Hard, 12));
  ProtocolSpec spec;
  spec.method = Method::LDA;
  spec.speed = Condition::Walk16;
  auto serial = run_session_dependent(ds.ear, spec);
  spec.jobs = 4;
  auto parallel = run_session_dependent(ds.ear, spec);
  CHECK(serial == parallel);
}
