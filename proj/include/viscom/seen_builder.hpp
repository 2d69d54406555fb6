#pragma once

// Seen commonsense for one image: scene-graph triples mapped by part of
// speech, LocatedNear from co-occurrence, and region-phrase triples grounded
// to a unique object box.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "viscom/ingest.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/phrase_engine.hpp"
#include "viscom/taxonomy.hpp"

namespace viscom {

enum class Provenance { SceneTriple, CoOccurrence, RegionPhrase, KbRetrieval };

constexpr std::string_view name_of(Provenance p) {
  switch (p) {
    case Provenance::SceneTriple: return "SceneTriple";
    case Provenance::CoOccurrence: return "CoOccurrence";
    case Provenance::RegionPhrase: return "RegionPhrase";
    case Provenance::KbRetrieval: return "KbRetrieval";
  }
  return {};
}

inline std::optional<Provenance> provenance_from_name(std::string_view name) {
  for (auto p : {Provenance::SceneTriple, Provenance::CoOccurrence, Provenance::RegionPhrase, Provenance::KbRetrieval}) {
    if (name_of(p) == name) return p;
  }
  return std::nullopt;
}

struct CommonsenseTriple {
  std::string head_id;    // object_id of the grounded head
  std::string head_name;  // canonical name of that object
  CategoryPath category;
  std::string tail;
  Provenance provenance = Provenance::SceneTriple;
  double score = 0.0;  // KB weight for Unseen triples, 0 for Seen

  friend bool operator==(const CommonsenseTriple&, const CommonsenseTriple&) = default;
};

// Skip counters reported once per run.
struct Diagnostics {
  std::uint64_t scene_triples = 0;
  std::uint64_t not_mapped = 0;
  std::uint64_t phrases = 0;
  std::uint64_t unparseable = 0;
  std::uint64_t no_match = 0;
  std::uint64_t ambiguous = 0;
  std::uint64_t region_triples = 0;
  std::uint64_t tail_grounded = 0;
  std::uint64_t tail_text_only = 0;

  Diagnostics& operator+=(const Diagnostics& o) {
    scene_triples += o.scene_triples;
    not_mapped += o.not_mapped;
    phrases += o.phrases;
    unparseable += o.unparseable;
    no_match += o.no_match;
    ambiguous += o.ambiguous;
    region_triples += o.region_triples;
    tail_grounded += o.tail_grounded;
    tail_text_only += o.tail_text_only;
    return *this;
  }

  double skip_rate() const { return phrases == 0 ? 0.0 : static_cast<double>(unparseable) / phrases; }

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

namespace detail {

inline bool is_copula(std::string_view w) { return w == "is" || w == "are" || w == "was" || w == "were"; }

inline std::vector<std::string> strip_copulas(std::string_view predicate) {
  auto words = text::split_words(text::normalize_name(predicate));
  auto first = std::find_if_not(words.begin(), words.end(), [](const std::string& w) { return is_copula(w); });
  return {first, words.end()};
}

inline std::optional<std::vector<TaggedToken>> try_tag(std::string_view phrase, const Lexicon& lex) {
  try {
    return tokenize_and_tag(phrase, lex);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::EmptyPhrase) return std::nullopt;
    throw;
  }
}

inline std::string simplified_name(std::string_view name, const Lexicon& lex) {
  auto tokens = try_tag(name, lex);
  if (!tokens) return std::string(name);
  try {
    return simplify_np(*tokens, lex);
  } catch (const Error&) {
    return std::string(name);
  }
}

inline bool blank(std::string_view s) { return text::trim(s).empty(); }

}  // namespace detail

// Maps one scene-graph triple onto the Seen layer, or nullopt when the
// predicate carries no mappable part of speech.
//
// Attribute slot: the first adjective or verb form decides; an unknown word
// there is read as an adjective ("wooden", "metal"). Relationship slot: a
// verb form decides, else a preposition; an unknown head word is read as an
// active verb ("play").
inline std::optional<CommonsenseTriple> map_scene_triple(const SceneTriple& t, const Image& image,
                                                         const Lexicon& lex) {
  const GroundedObject* subject = image.find_object(t.subject_id);
  if (subject == nullptr) return std::nullopt;
  auto pred_words = detail::strip_copulas(t.predicate);

  std::optional<PosTag> decisive;
  std::string tail;
  if (t.kind == TripleKind::Attribute) {
    auto words = pred_words;
    words.push_back(t.object_slot);
    auto tokens = detail::try_tag(text::join(words, " "), lex);
    if (!tokens) return std::nullopt;
    for (const auto& tok : *tokens) {
      if (tok.pos == PosTag::ADJ || tok.pos == PosTag::VB || tok.pos == PosTag::VBG || tok.pos == PosTag::VBN) {
        decisive = tok.pos;
        break;
      }
    }
    if (!decisive && tokens->back().pos == PosTag::NOUN) decisive = PosTag::ADJ;
    tail = text::normalize_name(t.object_slot);
  } else {
    if (pred_words.empty()) return std::nullopt;
    auto tokens = detail::try_tag(text::join(pred_words, " "), lex);
    const GroundedObject* object = image.find_object(t.object_slot);
    if (!tokens || object == nullptr) return std::nullopt;
    for (const auto& tok : *tokens) {
      if (tok.pos == PosTag::VB || tok.pos == PosTag::VBG || tok.pos == PosTag::VBN) {
        decisive = tok.pos;
        break;
      }
    }
    if (!decisive && std::any_of(tokens->begin(), tokens->end(), [](const auto& k) { return k.pos == PosTag::PREP; })) {
      decisive = PosTag::PREP;
    }
    if (!decisive && tokens->front().pos == PosTag::NOUN) decisive = PosTag::VB;
    std::vector<std::string> surfaces;
    for (const auto& tok : *tokens) surfaces.push_back(tok.surface);
    tail = text::join(surfaces, " ") + " " + detail::simplified_name(object->name, lex);
  }
  if (!decisive || detail::blank(tail)) return std::nullopt;
  auto category = pos_to_seen_category(*decisive, Voice::None);
  if (!category) return std::nullopt;
  return CommonsenseTriple{subject->object_id, subject->name, *category, tail, Provenance::SceneTriple, 0.0};
}

// Directed LocatedNear for every ordered pair of differently named objects.
inline std::vector<CommonsenseTriple> cooccurrence_triples(const std::vector<GroundedObject>& objects) {
  std::vector<CommonsenseTriple> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : objects) {
    for (const auto& b : objects) {
      if (&a == &b || a.name == b.name) continue;
      if (!seen.emplace(a.object_id, b.name).second) continue;
      out.push_back({a.object_id, a.name, categories::kSeenLocatedNear, b.name, Provenance::CoOccurrence, 0.0});
    }
  }
  return out;
}

struct RegionTriple {
  std::string head_name;
  CategoryPath category;
  std::string tail;

  friend bool operator==(const RegionTriple&, const RegionTriple&) = default;
};

// Applies every matching mapping rule; NP modifier rules compose with the
// phrase-level PP / VP rule.
inline std::vector<RegionTriple> extract_region_triples(const PhraseParse& parse) {
  std::vector<RegionTriple> out;
  const std::string& root = parse.root_noun;
  for (const auto& adj : parse.adjectives) out.push_back({root, categories::kSeenHasProperty, adj});
  for (const auto& part : parse.participles) out.push_back({root, categories::kSeenCapableOf, part});
  if (parse.kind == PhraseKind::PP_PHRASE && parse.prep && parse.tail_head_noun) {
    out.push_back({root, categories::kSeenRelatedness, *parse.prep + " " + *parse.tail_head_noun});
  }
  if (parse.kind == PhraseKind::VP_PHRASE && parse.verb) {
    auto category = parse.verb->pos == PosTag::VBN ? categories::kSeenReceivesAction : categories::kSeenCapableOf;
    out.push_back({root, category, parse.verb->complement});
  }
  std::erase_if(out, [](const RegionTriple& t) { return detail::blank(t.tail); });
  return out;
}

// Fraction of the object's area covered by the region: |R ∩ O| / |O|.
inline double overlap_ratio(const BBox& region, const BBox& object) {
  std::int64_t ix = std::max<std::int64_t>(0, std::min(region.x + region.w, object.x + object.w) - std::max(region.x, object.x));
  std::int64_t iy = std::max<std::int64_t>(0, std::min(region.y + region.h, object.y + object.h) - std::max(region.y, object.y));
  if (object.area() <= 0) return 0.0;
  return static_cast<double>(ix * iy) / static_cast<double>(object.area());
}

enum class LocalizeStatus { Matched, NoMatch, Ambiguous };

struct LocalizeResult {
  LocalizeStatus status = LocalizeStatus::NoMatch;
  const GroundedObject* object = nullptr;
};

// Candidates are objects covered by the region at ratio >= tau; the head
// grounds only if exactly one candidate's lemmatized name equals head_name.
inline LocalizeResult localize(std::string_view head_name, const Region& region,
                               const std::vector<GroundedObject>& objects, double tau, const Lexicon& lex) {
  LocalizeResult result;
  std::size_t matches = 0;
  for (const auto& obj : objects) {
    if (overlap_ratio(region.bbox, obj.bbox) < tau) continue;
    if (obj.name != head_name && lemmatize(obj.name, lex) != head_name) continue;
    ++matches;
    result.object = &obj;
  }
  if (matches == 0) return {LocalizeStatus::NoMatch, nullptr};
  if (matches > 1) return {LocalizeStatus::Ambiguous, nullptr};
  result.status = LocalizeStatus::Matched;
  return result;
}

struct SeenOptions {
  double tau = 0.5;
};

namespace detail {

inline void dedup_and_order(std::vector<CommonsenseTriple>& triples) {
  std::set<std::tuple<std::string, std::size_t, std::string>> keys;
  std::vector<CommonsenseTriple> unique;
  unique.reserve(triples.size());
  for (auto& t : triples) {
    if (keys.emplace(t.head_id, t.category.index(), t.tail).second) unique.push_back(std::move(t));
  }
  std::stable_sort(unique.begin(), unique.end(), [](const CommonsenseTriple& a, const CommonsenseTriple& b) {
    if (a.head_id != b.head_id) return a.head_id < b.head_id;
    if (a.category != b.category) return a.category.str() < b.category.str();
    return a.tail < b.tail;
  });
  triples = std::move(unique);
}

}  // namespace detail

// All Seen triples of one image, deduplicated on (head, category, tail) with
// the first provenance kept, ordered by (head object_id, category string, tail).
inline std::vector<CommonsenseTriple> build_seen(const Image& image, const Lexicon& lex, const SeenOptions& opts,
                                                 Diagnostics* diag = nullptr) {
  Diagnostics local;
  std::vector<CommonsenseTriple> out;

  for (const auto& t : image.triples) {
    ++local.scene_triples;
    if (auto mapped = map_scene_triple(t, image, lex)) {
      out.push_back(std::move(*mapped));
    } else {
      ++local.not_mapped;
    }
  }

  auto near = cooccurrence_triples(image.objects);
  out.insert(out.end(), std::make_move_iterator(near.begin()), std::make_move_iterator(near.end()));

  for (const auto& region : image.regions) {
    ++local.phrases;
    auto tokens = detail::try_tag(region.phrase, lex);
    std::optional<PhraseParse> parse;
    if (tokens) parse = parse_region_phrase(*tokens, lex);
    if (!parse) {
      ++local.unparseable;
      continue;
    }
    auto triples = extract_region_triples(*parse);
    if (triples.empty()) continue;
    auto loc = localize(parse->root_noun, region, image.objects, opts.tau, lex);
    if (loc.status == LocalizeStatus::NoMatch) {
      ++local.no_match;
      continue;
    }
    if (loc.status == LocalizeStatus::Ambiguous) {
      ++local.ambiguous;
      continue;
    }
    if (parse->kind == PhraseKind::PP_PHRASE) {
      auto tail_loc = localize(*parse->tail_head_noun, region, image.objects, opts.tau, lex);
      ++(tail_loc.status == LocalizeStatus::Matched ? local.tail_grounded : local.tail_text_only);
    }
    for (auto& rt : triples) {
      ++local.region_triples;
      out.push_back({loc.object->object_id, loc.object->name, rt.category, std::move(rt.tail),
                     Provenance::RegionPhrase, 0.0});
    }
  }

  detail::dedup_and_order(out);
  if (diag != nullptr) *diag += local;
  return out;
}

}  // namespace viscom
