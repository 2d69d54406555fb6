#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "test_support.hpp"
#include "viscom/unseen_builder.hpp"

namespace viscom {
namespace {

using testing::lexicon;

GroundedObject object(std::string id, std::string name) { return {std::move(id), "img", std::move(name), {0, 0, 5, 5}}; }

CommonsenseTriple unseen(std::string head, std::string relation, std::string tail, double score,
                         std::string head_name = "man") {
  return {std::move(head), std::move(head_name), *kb_relation_to_category(relation), std::move(tail),
          Provenance::KbRetrieval, score};
}

TEST(Synset, Examples) {
  EXPECT_EQ(make_synset(object("o1", "traffic lights"), lexicon()).forms,
            (std::vector<std::string>{"traffic lights", "traffic light", "traffic_lights", "traffic_light"}));
  EXPECT_EQ(make_synset(object("o1", "car"), lexicon()).forms, std::vector<std::string>{"car"});
  EXPECT_EQ(make_synset(object("o1", "men"), lexicon()).forms, (std::vector<std::string>{"men", "man"}));
  EXPECT_EQ(make_synset(object("o7", "men"), lexicon()).object_id, "o7");
}

TEST(RetrieveUnseen, CarExample) {
  KbIndex kb({{"car", "UsedFor", "drive to work", 1.0},
              {"car", "CreatedBy", "factory", 1.0},
              {"dog", "CapableOf", "bark", 1.0},
              {"car", "AtLocation", "garage", 1.0}});
  auto got = retrieve_unseen(object("o1", "car"), kb, lexicon());
  ASSERT_EQ(got.size(), 2u);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& t : got) {
    pairs.emplace(t.category.str(), t.tail);
    EXPECT_EQ(t.provenance, Provenance::KbRetrieval);
    EXPECT_EQ(t.head_id, "o1");
  }
  EXPECT_EQ(pairs, (std::set<std::pair<std::string, std::string>>{{"/Unseen/Action/UsedFor", "drive to work"},
                                                                    {"/Unseen/Property/CreatedBy", "factory"}}));
  EXPECT_TRUE(retrieve_unseen(object("o2", "tree"), kb, lexicon()).empty());
}

TEST(RetrieveUnseen, PluralAndCompoundNamesReachLemmaHeads) {
  KbIndex kb({{"traffic light", "UsedFor", "control traffic", 2.0}, {"man", "CapableOf", "grow up", 1.0}});
  EXPECT_EQ(retrieve_unseen(object("o1", "traffic lights"), kb, lexicon()).size(), 1u);
  EXPECT_EQ(retrieve_unseen(object("o2", "men"), kb, lexicon()).size(), 1u);
}

TEST(RetrieveUnseen, DeduplicatesOnCategoryAndTail) {
  KbIndex kb({{"men", "CapableOf", "grow up", 3.0},
              {"man", "CapableOf", "grow up", 1.0},
              {"man", "UsedFor", "grow up", 1.0}});
  auto got = retrieve_unseen(object("o1", "men"), kb, lexicon());
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].score, 3.0);  // surface form is looked up first
}

TEST(DedupAgainstSeen, Examples) {
  std::vector<CommonsenseTriple> seen{
      {"o1", "man", categories::kSeenCapableOf, "play skateboard", Provenance::SceneTriple, 0.0}};
  auto kept = dedup_against_seen({unseen("o1", "CapableOf", "play skateboard", 1.0),
                                  unseen("o1", "CapableOf", "grow up", 1.0),
                                  unseen("o2", "CapableOf", "play skateboard", 1.0),
                                  unseen("o1", "UsedFor", "play skateboard", 1.0)},
                                 seen);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].tail, "grow up");
  EXPECT_EQ(kept[1].head_id, "o2");
  EXPECT_EQ(kept[2].category.relation(), Relation::UsedFor);
  EXPECT_TRUE(dedup_against_seen({}, seen).empty());
}

TEST(ObjectAwareSort, MentioningTailRanksFirst) {
  auto sorted = object_aware_sort({unseen("o1", "CapableOf", "grow up", 5.0), unseen("o1", "ReceivesAction", "hit by a car", 0.1)},
                                  {"man", "car"}, lexicon());
  ASSERT_EQ(sorted.size(), 2u);
  EXPECT_EQ(sorted[0].tail, "hit by a car");
}

TEST(ObjectAwareSort, PluralMentionsAndCompoundLemmas) {
  EXPECT_TRUE(mentions_image_object("hit by cars", {"car"}, "man", lexicon()));
  EXPECT_TRUE(mentions_image_object("stop at a traffic light", {"traffic light"}, "car", lexicon()));
  EXPECT_FALSE(mentions_image_object("stop at a light", {"traffic light"}, "car", lexicon()));
  EXPECT_FALSE(mentions_image_object("carpet", {"car"}, "man", lexicon()));
  EXPECT_FALSE(mentions_image_object("grow into a man", {"man"}, "man", lexicon()));
  EXPECT_FALSE(mentions_image_object("", {"car"}, "man", lexicon()));
}

TEST(ObjectAwareSort, WithoutMentionsOrdersByScoreThenTail) {
  const std::vector<CommonsenseTriple> input{unseen("o1", "CapableOf", "b", 1.0), unseen("o1", "CapableOf", "a", 1.0),
                                             unseen("o1", "CapableOf", "c", 2.0), unseen("o1", "UsedFor", "a", 0.5)};
  const std::vector<std::string> expected{"c", "a", "b", "a"};
  std::vector<std::size_t> perm{0, 1, 2, 3};
  // Every input order yields the same output.
  do {
    std::vector<CommonsenseTriple> shuffled;
    for (auto i : perm) shuffled.push_back(input[i]);
    auto sorted = object_aware_sort(shuffled, {"man"}, lexicon());
    std::vector<std::string> tails;
    for (const auto& t : sorted) tails.push_back(t.tail);
    EXPECT_EQ(tails, expected);
    EXPECT_EQ(sorted[3].category.relation(), Relation::UsedFor);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(ObjectAwareSort, EmptyInput) { EXPECT_TRUE(object_aware_sort({}, {"man"}, lexicon()).empty()); }

// Brute-force reference: filter the full edge list by synset head and
// in-scope relation, dedup on (category, tail) in synset-form order.
std::vector<std::tuple<std::size_t, std::string, double>> brute_force(const GroundedObject& obj,
                                                                       const std::vector<KbEdge>& edges) {
  const auto forms = make_synset(obj, lexicon()).forms;
  std::vector<std::tuple<std::size_t, std::string, double>> out;
  std::set<std::pair<std::size_t, std::string>> keys;
  for (const auto& form : forms) {
    const std::string wanted = text::normalize_name(text::replace_all(form, '_', ' '));
    for (auto category : unseen_categories()) {
      for (const auto& e : edges) {
        if (e.head != wanted || e.relation != name_of(category.relation())) continue;
        if (keys.emplace(category.index(), e.tail).second) out.emplace_back(category.index(), e.tail, e.weight);
      }
    }
  }
  return out;
}

std::vector<KbEdge> random_kb(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> heads{"man", "men", "car", "cars", "traffic light", "dog", "tree", "bus"};
  static const std::vector<std::string> relations{"HasProperty", "CreatedBy", "LocatedNear", "CapableOf",
                                                  "UsedFor",     "ReceivesAction", "AtLocation", "IsA", "Relatedness"};
  static const std::vector<std::string> tails{"car", "road", "fast", "factory", "grow up", "man", "bark",
                                              "hit by a car", "a tree", "stop", "red", "the bus stop"};
  std::vector<KbEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({heads[rng() % heads.size()], relations[rng() % relations.size()], tails[rng() % tails.size()],
                     static_cast<double>(rng() % 4)});
  }
  return edges;
}

TEST(RetrieveUnseenProperty, MatchesBruteForceFiltering) {
  std::mt19937_64 rng(41);
  const std::vector<std::string> names{"man", "men", "car", "traffic lights", "dog", "zebra"};
  for (int c = 0; c < 200; ++c) {
    auto edges = random_kb(rng, 1 + rng() % 400);
    KbIndex kb(edges);
    auto obj = object("o1", names[rng() % names.size()]);
    auto got = retrieve_unseen(obj, kb, lexicon());
    std::vector<std::tuple<std::size_t, std::string, double>> got_rows;
    for (const auto& t : got) {
      EXPECT_FALSE(t.category.seen());
      EXPECT_EQ(t.provenance, Provenance::KbRetrieval);
      got_rows.emplace_back(t.category.index(), t.tail, t.score);
    }
    ASSERT_EQ(got_rows, brute_force(obj, edges)) << obj.name;
  }
}

TEST(ObjectAwareSortProperty, PermutationWithMentioningPrefix) {
  std::mt19937_64 rng(42);
  const std::set<std::string> lemmas{"man", "car", "tree", "traffic light"};
  for (int c = 0; c < 200; ++c) {
    auto edges = random_kb(rng, rng() % 30);
    std::vector<CommonsenseTriple> input;
    for (const auto& e : edges) {
      if (auto cat = kb_relation_to_category(e.relation)) {
        input.push_back({"o1", "dog", *cat, e.tail, Provenance::KbRetrieval, e.weight});
      }
    }
    auto sorted = object_aware_sort(input, lemmas, lexicon());
    auto key = [](const CommonsenseTriple& t) { return std::make_tuple(t.category.index(), t.tail, t.score); };
    std::multiset<std::tuple<std::size_t, std::string, double>> a;
    std::multiset<std::tuple<std::size_t, std::string, double>> b;
    for (const auto& t : input) a.insert(key(t));
    for (const auto& t : sorted) b.insert(key(t));
    ASSERT_EQ(a, b);
    bool in_prefix = true;
    for (const auto& t : sorted) {
      bool mentions = mentions_image_object(t.tail, lemmas, "dog", lexicon());
      if (!mentions) in_prefix = false;
      EXPECT_FALSE(mentions && !in_prefix) << t.tail;
    }
    std::shuffle(input.begin(), input.end(), rng);
    EXPECT_EQ(object_aware_sort(input, lemmas, lexicon()), sorted);
  }
}

TEST(BuildUnseen, FixtureImageGroupsByObjectAndDropsSeenDuplicates) {
  auto kb = load_kb(testing::fixture("kb_small.tsv"));
  Image img;
  img.image_id = "img";
  img.objects = {object("o1", "man"), object("o2", "cars"), object("o3", "horse")};
  std::vector<CommonsenseTriple> seen{
      {"o1", "man", categories::kSeenCapableOf, "grow up", Provenance::SceneTriple, 0.0}};
  auto got = build_unseen(img, kb, lexicon(), seen);
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got.front().head_id, "o1");
  EXPECT_EQ(got.front().tail, "drive a car");  // mentions "car", highest weight among mentioning tails
  for (const auto& t : got) EXPECT_FALSE(t.head_id == "o1" && t.tail == "grow up");
  auto kept = build_unseen(img, kb, lexicon(), seen, UnseenOptions{false});
  EXPECT_EQ(kept.size(), got.size() + 1);
  for (std::size_t i = 1; i < got.size(); ++i) EXPECT_LE(got[i - 1].head_id, got[i].head_id);
}

}  // namespace
}  // namespace viscom
