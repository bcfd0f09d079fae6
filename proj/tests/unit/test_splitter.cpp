#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "splitguard/errors.hpp"
#include "splitguard/plan_io.hpp"
#include "splitguard/splitter.hpp"

using namespace splitguard;
using sgtest::rec;
using sgtest::variant;

namespace {

SplitConfig config(SplitScheme scheme, int k, std::uint64_t seed = 0, double vf = 0.10) {
  SplitConfig cfg;
  cfg.scheme = scheme;
  cfg.k = k;
  cfg.seed = seed;
  cfg.val_fraction_of_total = vf;
  return cfg;
}

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::io_error;
}

std::set<std::string> ids(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Splitter, SchemeNames) {
  EXPECT_EQ(parse_scheme("subject"), SplitScheme::subject_wise);
  EXPECT_EQ(parse_scheme("record_wise"), SplitScheme::record_wise);
  EXPECT_EQ(parse_scheme("late"), SplitScheme::late_wise);
  EXPECT_FALSE(parse_scheme("random").has_value());
  EXPECT_EQ(scheme_name(SplitScheme::late_wise), "late_wise");
}

TEST(Splitter, ToySubjectWiseK2) {
  const auto m = DatasetManifest::build({rec("a1", "s1", 0, "CN"), rec("a2", "s1", 1, "CN"), rec("b1", "s2", 0, "CN"),
                                         rec("b2", "s2", 1, "CN"), rec("c1", "s3", 0, "AD"), rec("d1", "s4", 0, "AD")});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto plan = split_subject_wise(m, config(SplitScheme::subject_wise, 2, seed, 0.0));
    for (int f = 0; f < 2; ++f) {
      const auto test = ids(plan.roles[static_cast<std::size_t>(f)].test);
      const bool s1 = test.count("a1") && test.count("a2");
      const bool s2 = test.count("b1") && test.count("b2");
      EXPECT_TRUE(s1 != s2);
      EXPECT_EQ(test.size(), 3u);
      EXPECT_EQ(test.count("c1") + test.count("d1"), 1u);
    }
  }
}

TEST(Splitter, ReferenceCohortSubjectCountsPerFold) {
  const auto m = sgtest::reference_cohort();
  const auto plan = split_subject_wise(m, config(SplitScheme::subject_wise, 5, 3));
  std::vector<std::map<std::string, std::set<std::string>>> subjects(5);
  for (const auto& r : m.records()) subjects[static_cast<std::size_t>(plan.assignment.at(r.record_id))][r.class_label].insert(r.subject_id);
  for (int f = 0; f < 5; ++f) {
    const auto& s = subjects[static_cast<std::size_t>(f)];
    EXPECT_TRUE(s.at("CN").size() == 8 || s.at("CN").size() == 9);
    EXPECT_EQ(s.at("MCI").size(), 9u);
    EXPECT_EQ(s.at("AD").size(), 5u);
  }
}

TEST(Splitter, SubjectWiseHasNoSubjectInTwoFoldsExhaustive) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 50; ++i) {
    sgtest::RandomManifestShape shape;
    shape.k = 2 + i % 4;
    shape.n_classes = 3;
    const auto m = sgtest::random_manifest(gen, shape);
    const auto plan = split_subject_wise(m, config(SplitScheme::subject_wise, shape.k, gen()));
    for (int f = 0; f < plan.k; ++f)
      for (int g = f + 1; g < plan.k; ++g) {
        std::set<std::string> a, b;
        for (const auto& id : plan.roles[static_cast<std::size_t>(f)].test) a.insert(m.at(id).subject_id);
        for (const auto& id : plan.roles[static_cast<std::size_t>(g)].test) b.insert(m.at(id).subject_id);
        for (const auto& s : a) EXPECT_EQ(b.count(s), 0u) << s;
      }
  }
}

TEST(Splitter, RecordWiseSpreadsOneSubjectsVisits) {
  std::vector<RecordEntry> r;
  for (std::uint32_t v = 0; v < 5; ++v) r.push_back(rec("s1-v" + std::to_string(v), "s1", v, "CN"));
  const auto m = DatasetManifest::build(r);
  const auto plan = split_record_wise(m, config(SplitScheme::record_wise, 5, 9, 0.0));
  std::set<int> folds;
  for (const auto& [id, f] : plan.assignment) folds.insert(f);
  EXPECT_EQ(folds.size(), 5u);
}

TEST(Splitter, RecordWiseReferenceCohortTestFolds) {
  const auto m = sgtest::reference_cohort();
  const auto plan = split_record_wise(m, config(SplitScheme::record_wise, 5, 1));
  for (int f = 0; f < 5; ++f) {
    const auto& test = plan.roles[static_cast<std::size_t>(f)].test;
    EXPECT_EQ(test.size(), 180u);
    std::map<std::string, int> n;
    for (const auto& id : test) ++n[m.at(id).class_label];
    EXPECT_EQ(n, (std::map<std::string, int>{{"AD", 60}, {"CN", 60}, {"MCI", 60}}));
  }
}

TEST(Splitter, SingletonSubjectsMakeRecordAndSubjectWiseCoincide) {
  std::vector<RecordEntry> r;
  for (int i = 0; i < 23; ++i) {
    const auto id = "x" + std::to_string(100 + i);
    r.push_back(rec(id, id, 0, i % 3 == 0 ? "AD" : "CN"));
  }
  const auto m = DatasetManifest::build(r);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = split_subject_wise(m, config(SplitScheme::subject_wise, 4, seed));
    const auto b = split_record_wise(m, config(SplitScheme::record_wise, 4, seed));
    EXPECT_EQ(a.assignment, b.assignment);
  }
}

TEST(Splitter, LateWiseSiblingsOccupyDistinctFolds) {
  const auto src = rec("r", "s1", 0, "CN");
  auto a = variant(src, "flip");
  auto b = variant(src, "rot");
  std::vector<RecordEntry> recs{src, a, b};
  for (int i = 0; i < 5; ++i) recs.push_back(rec("z" + std::to_string(i), "t" + std::to_string(i), 0, "CN"));
  const auto m = DatasetManifest::build(recs);
  const auto plan = split_late_wise(m, config(SplitScheme::late_wise, 3));
  EXPECT_EQ((std::set<int>{plan.assignment.at("r"), plan.assignment.at("r-flip"), plan.assignment.at("r-rot")}).size(),
            3u);
}

TEST(Splitter, LateWiseReferenceCohort) {
  const auto m = sgtest::reference_cohort();
  const auto plan = split_late_wise(m, config(SplitScheme::late_wise, 5));
  std::size_t collisions = 0;
  for (int f = 0; f < 5; ++f) {
    const auto& roles = plan.roles[static_cast<std::size_t>(f)];
    EXPECT_EQ(roles.test.size(), 180u);
    std::map<std::string, int> n;
    for (const auto& id : roles.test) ++n[m.at(id).class_label];
    EXPECT_EQ(n.at("AD"), 60);
    std::set<std::string> train_roots;
    for (const auto& id : roles.train) train_roots.insert(m.at(id).lineage_root());
    for (const auto& id : roles.test) collisions += train_roots.count(m.at(id).lineage_root());
  }
  EXPECT_GT(collisions, 0u);
}

TEST(Splitter, LateWiseIgnoresTheSeedForFoldAssignment) {
  const auto m = sgtest::reference_cohort();
  EXPECT_EQ(split_late_wise(m, config(SplitScheme::late_wise, 5, 1)).assignment,
            split_late_wise(m, config(SplitScheme::late_wise, 5, 2)).assignment);
}

TEST(Splitter, LateWiseNeedsLineageUnlessAcknowledged) {
  std::vector<RecordEntry> r;
  for (int i = 0; i < 6; ++i) r.push_back(rec("r" + std::to_string(i), "s" + std::to_string(i), 0, "CN"));
  const auto m = DatasetManifest::build(r);
  auto cfg = config(SplitScheme::late_wise, 3);
  EXPECT_EQ(error_of([&] { split_late_wise(m, cfg); }), Errc::degenerate_late_split);
  cfg.allow_degenerate_late = true;
  EXPECT_EQ(split_late_wise(m, cfg).assignment.size(), 6u);
}

TEST(Splitter, TrainValTestRatios) {
  const auto m = sgtest::reference_cohort();
  for (auto s : {SplitScheme::record_wise, SplitScheme::late_wise, SplitScheme::subject_wise}) {
    const auto plan = make_plan(m, config(s, 5, 4));
    for (int f = 0; f < 5; ++f) {
      const auto& r = derive_train_val_test(plan, f);
      if (s == SplitScheme::subject_wise) {
        EXPECT_NEAR(static_cast<double>(r.test.size()), 180.0, 24.0);
        // Whole subjects of up to 8 records (4 visits x2) or 12 (AD 2 x6).
        EXPECT_GE(r.val.size(), 90u);
        EXPECT_LE(r.val.size(), 180u);
      } else {
        EXPECT_EQ(r.test.size(), 180u);
        // Record-wise units are lineage groups of 2 or 6 records.
        EXPECT_NEAR(static_cast<double>(r.val.size()), 90.0, 12.0);
      }
      EXPECT_EQ(r.train.size() + r.val.size() + r.test.size(), 900u);
    }
  }
}

TEST(Splitter, ZeroValidationFraction) {
  const auto m = sgtest::reference_sources();
  const auto plan = make_plan(m, config(SplitScheme::record_wise, 2, 0, 0.0));
  for (int f = 0; f < 2; ++f) {
    const auto& r = derive_train_val_test(plan, f);
    EXPECT_TRUE(r.val.empty());
    EXPECT_EQ(r.train.size() + r.test.size(), m.size());
  }
}

TEST(Splitter, SubjectWiseValidationIsSubjectPure) {
  const auto m = sgtest::reference_cohort();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto plan = make_plan(m, config(SplitScheme::subject_wise, 5, seed));
    for (const auto& roles : plan.roles) {
      std::set<std::string> train_subjects;
      for (const auto& id : roles.train) train_subjects.insert(m.at(id).subject_id);
      for (const auto& id : roles.val) EXPECT_EQ(train_subjects.count(m.at(id).subject_id), 0u);
    }
  }
}

TEST(Splitter, FoldOutOfRange) {
  const auto plan = make_plan(sgtest::reference_sources(), config(SplitScheme::record_wise, 3));
  EXPECT_EQ(error_of([&] { derive_train_val_test(plan, 3); }), Errc::fold_out_of_range);
  EXPECT_EQ(error_of([&] { derive_train_val_test(plan, -1); }), Errc::fold_out_of_range);
}

TEST(Splitter, ConfigErrors) {
  const auto m = sgtest::reference_sources();
  EXPECT_EQ(error_of([&] { make_plan(m, config(SplitScheme::record_wise, 1)); }), Errc::invalid_config);
  EXPECT_EQ(error_of([&] { make_plan(m, config(SplitScheme::record_wise, 2, 0, 0.5)); }), Errc::invalid_config);
  EXPECT_EQ(error_of([&] { make_plan(m, config(SplitScheme::record_wise, 5, 0, -0.1)); }), Errc::invalid_config);
  EXPECT_EQ(error_of([&] { make_plan(m, config(SplitScheme::subject_wise, 26)); }), Errc::insufficient_subjects);
  EXPECT_EQ(error_of([&] { make_plan(m, config(SplitScheme::record_wise, 51)); }), Errc::insufficient_records);
  EXPECT_EQ(error_of([&] { split_record_wise(m, config(SplitScheme::subject_wise, 5)); }), Errc::invalid_config);
}

TEST(Splitter, InsufficientSubjectsCountsMajorityLabels) {
  // Two CN subjects, but only one has a CN majority.
  const auto m = DatasetManifest::build({rec("a", "s1", 0, "CN"), rec("b", "s2", 0, "CN"), rec("c", "s2", 1, "AD"),
                                         rec("d", "s2", 2, "AD"), rec("e", "s3", 0, "AD")});
  EXPECT_EQ(error_of([&] { split_subject_wise(m, config(SplitScheme::subject_wise, 2)); }),
            Errc::insufficient_subjects);
}

TEST(Splitter, DeterministicAndSeedSensitive) {
  const auto m = sgtest::reference_cohort();
  for (auto s : {SplitScheme::subject_wise, SplitScheme::record_wise, SplitScheme::late_wise}) {
    const auto a = plan_to_json(make_plan(m, config(s, 5, 77)));
    EXPECT_EQ(a, plan_to_json(make_plan(m, config(s, 5, 77))));
    if (s != SplitScheme::late_wise) {
      EXPECT_NE(a, plan_to_json(make_plan(m, config(s, 5, 78))));
    }
  }
}

TEST(Splitter, AddingAClassLeavesOtherClassesAlone) {
  std::vector<RecordEntry> base;
  for (int i = 0; i < 12; ++i) {
    base.push_back(rec("cn" + std::to_string(i), "pc" + std::to_string(i), 0, "CN"));
    base.push_back(rec("cn" + std::to_string(i) + "b", "pc" + std::to_string(i), 1, "CN"));
  }
  auto extended = base;
  for (int i = 0; i < 9; ++i) extended.push_back(rec("ad" + std::to_string(i), "pa" + std::to_string(i), 0, "AD"));
  const auto m1 = DatasetManifest::build(base);
  const auto m2 = DatasetManifest::build(extended);
  for (auto s : {SplitScheme::subject_wise, SplitScheme::record_wise}) {
    const auto p1 = make_plan(m1, config(s, 3, 5));
    const auto p2 = make_plan(m2, config(s, 3, 5));
    for (const auto& [id, f] : p1.assignment) EXPECT_EQ(p2.assignment.at(id), f) << id;
  }
}

TEST(Splitter, PlanJsonRoundTrip) {
  const auto m = sgtest::reference_cohort();
  const auto plan = make_plan(m, config(SplitScheme::subject_wise, 5, 12));
  const auto text = plan_to_json(plan);
  EXPECT_EQ(plan_from_json(text), plan);
  EXPECT_NE(text.find("\"schema_version\": 1"), std::string::npos);
  EXPECT_THROW(plan_from_json("{"), ParseError);
  EXPECT_THROW(plan_from_json("{\"k\": 2}"), ParseError);
}

// Stratification and partition hold on random manifests for every scheme.
TEST(SplitterProperty, PartitionAndStratification) {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 150; ++i) {
    sgtest::RandomManifestShape shape;
    shape.k = 2 + i % 4;
    shape.n_classes = 2 + i % 3;
    const auto m = sgtest::random_manifest(gen, shape);
    for (auto s : {SplitScheme::subject_wise, SplitScheme::record_wise, SplitScheme::late_wise}) {
      const auto plan = make_plan(m, config(s, shape.k, gen(), 0.1));
      ASSERT_EQ(plan.assignment.size(), m.size());
      std::map<std::string, std::vector<std::set<std::string>>> units;
      for (const auto& r : m.records()) {
        const int f = plan.assignment.at(r.record_id);
        ASSERT_GE(f, 0);
        ASSERT_LT(f, shape.k);
        std::string label = r.class_label, unit = r.record_id;
        if (s == SplitScheme::record_wise) {
          unit = r.lineage_root();
          label = m.at(unit).class_label;
        } else if (s == SplitScheme::subject_wise) {
          unit = r.subject_id;
          for (const auto& sum : summarize_subjects(m))
            if (sum.subject_id == unit) label = sum.majority_label;
        }
        auto& per_fold = units[label];
        per_fold.resize(static_cast<std::size_t>(shape.k));
        per_fold[static_cast<std::size_t>(f)].insert(unit);
      }
      for (const auto& [label, per_fold] : units) {
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& u : per_fold) {
          lo = std::min(lo, u.size());
          hi = std::max(hi, u.size());
        }
        EXPECT_LE(hi - lo, 1u) << scheme_name(s) << " " << label;
      }
    }
  }
}
