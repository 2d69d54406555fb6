#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "test_support.hpp"
#include "viscom/seen_builder.hpp"

namespace viscom {
namespace {

using testing::lexicon;

Image image_with(std::vector<GroundedObject> objects) {
  Image img;
  img.image_id = "img";
  for (auto& o : objects) o.image_id = "img";
  img.objects = std::move(objects);
  return img;
}

std::optional<CommonsenseTriple> map_attr(const Image& img, const std::string& subject, const std::string& pred,
                                          const std::string& value) {
  return map_scene_triple({"img", subject, pred, value, TripleKind::Attribute}, img, lexicon());
}

std::optional<CommonsenseTriple> map_rel(const Image& img, const std::string& subject, const std::string& pred,
                                         const std::string& object) {
  return map_scene_triple({"img", subject, pred, object, TripleKind::Relationship}, img, lexicon());
}

TEST(MapSceneTriple, BasicExamples) {
  auto img = image_with({{"o1", "", "man", {0, 0, 5, 5}}, {"o2", "", "road", {0, 0, 5, 5}},
                         {"o3", "", "skateboard", {0, 0, 5, 5}}});
  auto tall = map_attr(img, "o1", "is", "tall");
  ASSERT_TRUE(tall);
  EXPECT_EQ(tall->category, categories::kSeenHasProperty);
  EXPECT_EQ(tall->tail, "tall");
  EXPECT_EQ(tall->head_id, "o1");
  EXPECT_EQ(tall->provenance, Provenance::SceneTriple);

  auto on = map_rel(img, "o1", "on", "o2");
  ASSERT_TRUE(on);
  EXPECT_EQ(on->category, categories::kSeenRelatedness);
  EXPECT_EQ(on->tail, "on road");

  auto play = map_rel(img, "o1", "play", "o3");
  ASSERT_TRUE(play);
  EXPECT_EQ(play->category, categories::kSeenCapableOf);
  EXPECT_EQ(play->tail, "play skateboard");
}

TEST(MapSceneTriple, VerbFormsChooseTheActionLeaf) {
  auto img = image_with({{"o1", "", "man", {0, 0, 5, 5}}, {"o2", "", "yellow cars", {0, 0, 5, 5}}});
  auto riding = map_rel(img, "o1", "riding", "o2");
  ASSERT_TRUE(riding);
  EXPECT_EQ(riding->category, categories::kSeenCapableOf);
  EXPECT_EQ(riding->tail, "riding car");

  auto hit = map_rel(img, "o1", "is hit by", "o2");
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->category, categories::kSeenReceivesAction);
  EXPECT_EQ(hit->tail, "hit by car");

  auto has = map_rel(img, "o1", "has", "o2");
  ASSERT_TRUE(has);
  EXPECT_EQ(has->category, categories::kSeenCapableOf);
}

TEST(MapSceneTriple, AttributeReadings) {
  auto img = image_with({{"o1", "", "bench", {0, 0, 5, 5}}});
  EXPECT_EQ(map_attr(img, "o1", "", "wooden")->category, categories::kSeenHasProperty);
  EXPECT_EQ(map_attr(img, "o1", "is", "Metal")->tail, "metal");
  EXPECT_EQ(map_attr(img, "o1", "are", "parked")->category, categories::kSeenReceivesAction);
  EXPECT_EQ(map_attr(img, "o1", "is", "standing")->category, categories::kSeenCapableOf);
  EXPECT_FALSE(map_attr(img, "o1", "is", "the"));
  EXPECT_FALSE(map_attr(img, "o1", "is", "!!"));
}

TEST(MapSceneTriple, UnmappablePredicates) {
  auto img = image_with({{"o1", "", "man", {0, 0, 5, 5}}, {"o2", "", "car", {0, 0, 5, 5}}});
  EXPECT_FALSE(map_rel(img, "o1", "the", "o2"));
  EXPECT_FALSE(map_rel(img, "o1", "is", "o2"));
  EXPECT_FALSE(map_rel(img, "o1", "and", "o2"));
}

TEST(Cooccurrence, TwoObjectsBothDirections) {
  auto img = image_with({{"o1", "", "man", {0, 0, 5, 5}}, {"o2", "", "car", {0, 0, 5, 5}}});
  auto out = cooccurrence_triples(img.objects);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].head_id, "o1");
  EXPECT_EQ(out[0].tail, "car");
  EXPECT_EQ(out[0].category, categories::kSeenLocatedNear);
  EXPECT_EQ(out[0].provenance, Provenance::CoOccurrence);
  EXPECT_EQ(out[1].head_id, "o2");
  EXPECT_EQ(out[1].tail, "man");
}

TEST(Cooccurrence, EdgeCases) {
  EXPECT_TRUE(cooccurrence_triples({}).empty());
  EXPECT_TRUE(cooccurrence_triples(image_with({{"o1", "", "man", {0, 0, 5, 5}}}).objects).empty());
  auto three = image_with({{"a", "", "man", {0, 0, 1, 1}}, {"b", "", "car", {0, 0, 1, 1}}, {"c", "", "dog", {0, 0, 1, 1}}});
  EXPECT_EQ(cooccurrence_triples(three.objects).size(), 6u);
}

TEST(Cooccurrence, SameNamePairsAreSuppressedAndTailsDeduplicated) {
  auto img = image_with({{"a", "", "man", {0, 0, 1, 1}}, {"b", "", "man", {0, 0, 1, 1}}, {"c", "", "car", {0, 0, 1, 1}}});
  auto out = cooccurrence_triples(img.objects);
  std::set<std::tuple<std::string, std::string>> got;
  for (const auto& t : out) got.emplace(t.head_id, t.tail);
  EXPECT_EQ(got, (std::set<std::tuple<std::string, std::string>>{{"a", "car"}, {"b", "car"}, {"c", "man"}}));
  EXPECT_EQ(out.size(), 3u);
}

TEST(RegionTriples, MappingRuleExamples) {
  struct Case {
    const char* phrase;
    std::vector<RegionTriple> expected;
  };
  const std::vector<Case> cases{
      {"a thin man behind the yellow car",
       {{"man", categories::kSeenHasProperty, "thin"}, {"man", categories::kSeenRelatedness, "behind car"}}},
      {"car driving on the road", {{"car", categories::kSeenCapableOf, "driving on road"}}},
      {"a running man", {{"man", categories::kSeenCapableOf, "run"}}},
      {"man hit by a yellow car", {{"man", categories::kSeenReceivesAction, "hit by a car"}}},
      {"a small car", {{"car", categories::kSeenHasProperty, "small"}}},
      {"man before the yellow car", {{"man", categories::kSeenRelatedness, "before car"}}},
      {"a dog", {}},
  };
  for (const auto& c : cases) {
    auto parse = parse_region_phrase(tokenize_and_tag(c.phrase, lexicon()), lexicon());
    ASSERT_TRUE(parse) << c.phrase;
    EXPECT_EQ(extract_region_triples(*parse), c.expected) << c.phrase;
  }
}

// Pixel-counting reference for the covered fraction of the object box.
double rasterized_ratio(const BBox& region, const BBox& object) {
  std::int64_t covered = 0;
  for (std::int64_t y = object.y; y < object.y + object.h; ++y) {
    for (std::int64_t x = object.x; x < object.x + object.w; ++x) {
      covered += x >= region.x && x < region.x + region.w && y >= region.y && y < region.y + region.h;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(object.w * object.h);
}

BBox random_box(std::mt19937_64& rng, std::int64_t extent) {
  std::uniform_int_distribution<std::int64_t> pos(0, extent);
  std::uniform_int_distribution<std::int64_t> size(1, extent / 2);
  return {pos(rng), pos(rng), size(rng), size(rng)};
}

TEST(OverlapRatio, Examples) {
  EXPECT_EQ(overlap_ratio({3, 4, 10, 7}, {3, 4, 10, 7}), 1.0);
  EXPECT_EQ(overlap_ratio({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_EQ(overlap_ratio({0, 0, 10, 10}, {10, 0, 5, 5}), 0.0);  // touching edges share no pixel
  EXPECT_EQ(overlap_ratio({0, 0, 10, 10}, {5, 5, 10, 10}), 0.25);
  EXPECT_EQ(overlap_ratio({0, 0, 100, 100}, {10, 10, 5, 5}), 1.0);
  EXPECT_EQ(overlap_ratio({10, 10, 5, 5}, {0, 0, 100, 100}), 0.0025);
}

TEST(OverlapRatio, EqualsRasterizedOracle) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    auto r = random_box(rng, 60);
    auto o = random_box(rng, 60);
    ASSERT_EQ(overlap_ratio(r, o), rasterized_ratio(r, o)) << i;
  }
}

TEST(OverlapRatio, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 2000; ++i) {
    auto r = random_box(rng, 1000);
    auto o = random_box(rng, 1000);
    std::int64_t s = 1 + static_cast<std::int64_t>(rng() % 50);
    double base = overlap_ratio(r, o);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    EXPECT_EQ(overlap_ratio({r.x * s, r.y * s, r.w * s, r.h * s}, {o.x * s, o.y * s, o.w * s, o.h * s}), base);
  }
}

class LocalizeTest : public ::testing::Test {
 protected:
  Image img = image_with({{"o1", "", "man", {0, 0, 10, 10}},
                          {"o2", "", "men", {100, 100, 10, 10}},
                          {"o3", "", "car", {0, 0, 10, 10}}});
  Region region(BBox b) { return {"img", "x", b}; }
};

TEST_F(LocalizeTest, UniqueCandidateMatches) {
  auto r = localize("man", region({0, 0, 20, 20}), img.objects, 0.5, lexicon());
  EXPECT_EQ(r.status, LocalizeStatus::Matched);
  ASSERT_NE(r.object, nullptr);
  EXPECT_EQ(r.object->object_id, "o1");
}

TEST_F(LocalizeTest, TwoCandidatesAreAmbiguous) {
  auto r = localize("man", region({0, 0, 200, 200}), img.objects, 0.5, lexicon());
  EXPECT_EQ(r.status, LocalizeStatus::Ambiguous);
  EXPECT_EQ(r.object, nullptr);
}

TEST_F(LocalizeTest, NoCandidateAboveThreshold) {
  EXPECT_EQ(localize("man", region({300, 300, 5, 5}), img.objects, 0.5, lexicon()).status, LocalizeStatus::NoMatch);
  EXPECT_EQ(localize("dog", region({0, 0, 20, 20}), img.objects, 0.5, lexicon()).status, LocalizeStatus::NoMatch);
}

TEST_F(LocalizeTest, ThresholdIsInclusive) {
  // Region covers exactly half of o1.
  EXPECT_EQ(localize("man", region({0, 0, 5, 10}), img.objects, 0.5, lexicon()).status, LocalizeStatus::Matched);
  EXPECT_EQ(localize("man", region({0, 0, 5, 10}), img.objects, 0.51, lexicon()).status, LocalizeStatus::NoMatch);
}

// Two objects, one attribute triple and one region phrase, with every rule
// applied by hand.
TEST(BuildSeen, ToyImageExactTriples) {
  Image img = image_with({{"o1", "", "man", {10, 10, 40, 80}}, {"o2", "", "car", {60, 40, 100, 50}}});
  img.triples.push_back({"img", "o1", "is", "tall", TripleKind::Attribute});
  img.regions.push_back({"img", "a thin man behind the yellow car", {0, 0, 55, 100}});

  Diagnostics diag;
  auto got = build_seen(img, lexicon(), {}, &diag);
  using Row = std::tuple<std::string, std::string, std::string, Provenance>;
  std::vector<Row> rows;
  for (const auto& t : got) rows.emplace_back(t.head_id, t.category.str(), t.tail, t.provenance);
  const std::vector<Row> expected{
      {"o1", "/Seen/Property/HasProperty", "tall", Provenance::SceneTriple},
      {"o1", "/Seen/Property/HasProperty", "thin", Provenance::RegionPhrase},
      {"o1", "/Seen/Space/LocatedNear", "car", Provenance::CoOccurrence},
      {"o1", "/Seen/Space/Relatedness", "behind car", Provenance::RegionPhrase},
      {"o2", "/Seen/Space/LocatedNear", "man", Provenance::CoOccurrence},
  };
  EXPECT_EQ(rows, expected);
  EXPECT_EQ(diag.phrases, 1u);
  EXPECT_EQ(diag.region_triples, 2u);
  EXPECT_EQ(diag.tail_text_only, 1u);  // the region covers too little of the car
}

TEST(BuildSeen, SkateboardingSceneHasLocatedNear) {
  Image img = image_with({{"o1", "", "man", {10, 10, 40, 80}},
                          {"o2", "", "skateboard", {15, 85, 30, 8}},
                          {"o3", "", "car", {120, 30, 150, 70}}});
  img.triples.push_back({"img", "o1", "riding", "o2", TripleKind::Relationship});
  img.regions.push_back({"img", "man skateboarding by a car", {5, 5, 270, 100}});
  auto got = build_seen(img, lexicon(), {});
  auto has = [&](const std::string& head, CategoryPath c, const std::string& tail) {
    return std::any_of(got.begin(), got.end(),
                       [&](const auto& t) { return t.head_id == head && t.category == c && t.tail == tail; });
  };
  EXPECT_TRUE(has("o1", categories::kSeenLocatedNear, "car"));
  EXPECT_TRUE(has("o1", categories::kSeenCapableOf, "riding skateboard"));
  EXPECT_TRUE(has("o1", categories::kSeenCapableOf, "skateboarding by car"));
}

TEST(BuildSeen, EmptyImage) {
  Image img;
  img.image_id = "empty";
  EXPECT_TRUE(build_seen(img, lexicon(), {}).empty());
}

TEST(BuildSeen, DiagnosticsCountSkippedPhrases) {
  Image img = image_with({{"o1", "", "man", {0, 0, 10, 10}}, {"o2", "", "man", {0, 0, 10, 10}},
                          {"o3", "", "dog", {50, 50, 10, 10}}});
  img.regions.push_back({"img", "very very", {0, 0, 10, 10}});          // unparseable
  img.regions.push_back({"img", "a tall man", {0, 0, 10, 10}});         // ambiguous
  img.regions.push_back({"img", "a black cat", {0, 0, 10, 10}});        // no match
  img.regions.push_back({"img", "a brown dog", {50, 50, 10, 10}});      // grounded
  img.triples.push_back({"img", "o1", "the", "o3", TripleKind::Relationship});  // not mapped
  Diagnostics d;
  build_seen(img, lexicon(), {}, &d);
  EXPECT_EQ(d.phrases, 4u);
  EXPECT_EQ(d.unparseable, 1u);
  EXPECT_EQ(d.ambiguous, 1u);
  EXPECT_EQ(d.no_match, 1u);
  EXPECT_EQ(d.region_triples, 1u);
  EXPECT_EQ(d.scene_triples, 1u);
  EXPECT_EQ(d.not_mapped, 1u);
  EXPECT_DOUBLE_EQ(d.skip_rate(), 0.25);
}

TEST(BuildSeen, DuplicatesKeepFirstProvenance) {
  Image img = image_with({{"o1", "", "man", {0, 0, 10, 10}}});
  img.triples.push_back({"img", "o1", "is", "tall", TripleKind::Attribute});
  img.regions.push_back({"img", "a tall man", {0, 0, 10, 10}});
  img.regions.push_back({"img", "the tall man", {0, 0, 10, 10}});
  auto got = build_seen(img, lexicon(), {});
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].provenance, Provenance::SceneTriple);
}

// Random images over a small name pool with random triples and regions.
Image random_image(std::mt19937_64& rng) {
  static const std::vector<std::string> names{"man", "woman", "car", "dog", "tree", "traffic light", "men", "bench"};
  static const std::vector<std::string> phrases{
      "a tall man",          "man on the bench",       "a dog running on the grass", "the red car",
      "woman hit by a car",  "a sleeping dog",         "traffic light near a tree",  "very very",
      "men sitting on the bench", "a car parked on the street"};
  static const std::vector<std::string> preds{"on", "near", "riding", "is", "hit by", "has", "the"};
  Image img;
  img.image_id = "r";
  std::size_t n = rng() % 7;
  for (std::size_t i = 0; i < n; ++i) {
    BBox b{static_cast<std::int64_t>(rng() % 100), static_cast<std::int64_t>(rng() % 100),
           1 + static_cast<std::int64_t>(rng() % 50), 1 + static_cast<std::int64_t>(rng() % 50)};
    img.objects.push_back({"o" + std::to_string(i), "r", names[rng() % names.size()], b});
  }
  for (std::size_t i = 0; n > 1 && i < rng() % 5; ++i) {
    img.triples.push_back({"r", img.objects[rng() % n].object_id, preds[rng() % preds.size()],
                           img.objects[rng() % n].object_id, TripleKind::Relationship});
  }
  for (std::size_t i = 0; i < rng() % 5; ++i) {
    BBox b{static_cast<std::int64_t>(rng() % 100), static_cast<std::int64_t>(rng() % 100),
           1 + static_cast<std::int64_t>(rng() % 120), 1 + static_cast<std::int64_t>(rng() % 120)};
    img.regions.push_back({"r", phrases[rng() % phrases.size()], b});
  }
  return img;
}

TEST(BuildSeenProperty, OutputIsSeenGroundedUniqueOrderedAndPure) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    auto img = random_image(rng);
    auto a = build_seen(img, lexicon(), {});
    auto b = build_seen(img, lexicon(), {});
    ASSERT_EQ(a, b);
    std::set<std::tuple<std::string, std::size_t, std::string>> keys;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto& t = a[k];
      EXPECT_TRUE(t.category.seen());
      EXPECT_NE(t.provenance, Provenance::KbRetrieval);
      EXPECT_NE(img.find_object(t.head_id), nullptr);
      EXPECT_FALSE(text::trim(t.tail).empty());
      EXPECT_TRUE(keys.emplace(t.head_id, t.category.index(), t.tail).second);
      if (k > 0) {
        const auto& p = a[k - 1];
        EXPECT_LE(std::make_tuple(p.head_id, p.category.str(), p.tail), std::make_tuple(t.head_id, t.category.str(), t.tail));
      }
    }
  }
}

TEST(CooccurrenceProperty, DistinctNamesGiveAllOrderedPairs) {
  std::mt19937_64 rng(32);
  for (int c = 0; c < 200; ++c) {
    std::size_t n = rng() % 21;
    std::vector<GroundedObject> objects;
    for (std::size_t i = 0; i < n; ++i) objects.push_back({"o" + std::to_string(i), "img", "name" + std::to_string(i), {}});
    std::shuffle(objects.begin(), objects.end(), rng);
    auto out = cooccurrence_triples(objects);
    ASSERT_EQ(out.size(), n * (n - (n > 0 ? 1 : 0)));
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& t : out) pairs.emplace(t.head_id, t.tail);
    EXPECT_EQ(pairs.size(), out.size());
  }
}

}  // namespace
}  // namespace viscom
