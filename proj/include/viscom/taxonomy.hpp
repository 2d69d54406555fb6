#pragma once

// Three-layer visual commonsense taxonomy: visibility, aspect, relation.
// Only eleven (visibility, aspect, relation) leaves exist; CategoryPath can
// only be obtained for one of them.

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "viscom/error.hpp"
#include "viscom/text.hpp"

namespace viscom {

enum class Visibility { Seen, Unseen };
enum class Aspect { Property, Action, Space };
enum class Relation { HasProperty, CreatedBy, LocatedNear, Relatedness, CapableOf, UsedFor, ReceivesAction };

inline constexpr std::array kAllVisibilities{Visibility::Seen, Visibility::Unseen};
inline constexpr std::array kAllAspects{Aspect::Property, Aspect::Action, Aspect::Space};
inline constexpr std::array kAllRelations{Relation::HasProperty, Relation::CreatedBy,   Relation::LocatedNear,
                                          Relation::Relatedness, Relation::CapableOf,   Relation::UsedFor,
                                          Relation::ReceivesAction};

constexpr std::string_view name_of(Visibility v) { return v == Visibility::Seen ? "Seen" : "Unseen"; }

constexpr std::string_view name_of(Aspect a) {
  switch (a) {
    case Aspect::Property: return "Property";
    case Aspect::Action: return "Action";
    case Aspect::Space: return "Space";
  }
  return {};
}

constexpr std::string_view name_of(Relation r) {
  switch (r) {
    case Relation::HasProperty: return "HasProperty";
    case Relation::CreatedBy: return "CreatedBy";
    case Relation::LocatedNear: return "LocatedNear";
    case Relation::Relatedness: return "Relatedness";
    case Relation::CapableOf: return "CapableOf";
    case Relation::UsedFor: return "UsedFor";
    case Relation::ReceivesAction: return "ReceivesAction";
  }
  return {};
}

// Part-of-speech tags produced by the phrase engine. VB covers finite and
// base verb forms listed in the lexicon.
enum class PosTag { DET, ADJ, NOUN, PREP, VB, VBG, VBN, OTHER };

constexpr std::string_view name_of(PosTag t) {
  switch (t) {
    case PosTag::DET: return "DET";
    case PosTag::ADJ: return "ADJ";
    case PosTag::NOUN: return "NOUN";
    case PosTag::PREP: return "PREP";
    case PosTag::VB: return "VB";
    case PosTag::VBG: return "VBG";
    case PosTag::VBN: return "VBN";
    case PosTag::OTHER: return "OTHER";
  }
  return {};
}

enum class Voice { Active, Passive, None };

class CategoryPath {
 public:
  struct Leaf {
    Visibility visibility;
    Aspect aspect;
    Relation relation;
  };

  // Table order: the five Seen leaves, then the six Unseen leaves.
  static constexpr std::array<Leaf, 11> kLeaves{{
      {Visibility::Seen, Aspect::Property, Relation::HasProperty},
      {Visibility::Seen, Aspect::Space, Relation::LocatedNear},
      {Visibility::Seen, Aspect::Space, Relation::Relatedness},
      {Visibility::Seen, Aspect::Action, Relation::CapableOf},
      {Visibility::Seen, Aspect::Action, Relation::ReceivesAction},
      {Visibility::Unseen, Aspect::Property, Relation::HasProperty},
      {Visibility::Unseen, Aspect::Property, Relation::CreatedBy},
      {Visibility::Unseen, Aspect::Space, Relation::LocatedNear},
      {Visibility::Unseen, Aspect::Action, Relation::CapableOf},
      {Visibility::Unseen, Aspect::Action, Relation::UsedFor},
      {Visibility::Unseen, Aspect::Action, Relation::ReceivesAction},
  }};
  static constexpr std::size_t kCount = kLeaves.size();

  static constexpr std::optional<CategoryPath> make(Visibility v, Aspect a, Relation r) {
    for (std::size_t i = 0; i < kCount; ++i) {
      const auto& leaf = kLeaves[i];
      if (leaf.visibility == v && leaf.aspect == a && leaf.relation == r) return CategoryPath(i);
    }
    return std::nullopt;
  }

  static constexpr CategoryPath at(std::size_t index) { return CategoryPath(index < kCount ? index : 0); }

  static constexpr std::array<CategoryPath, kCount> all() {
    std::array<CategoryPath, kCount> out{};
    for (std::size_t i = 0; i < kCount; ++i) out[i] = CategoryPath(i);
    return out;
  }

  constexpr CategoryPath() = default;

  constexpr Visibility visibility() const { return kLeaves[index_].visibility; }
  constexpr Aspect aspect() const { return kLeaves[index_].aspect; }
  constexpr Relation relation() const { return kLeaves[index_].relation; }
  constexpr std::size_t index() const { return index_; }
  constexpr bool seen() const { return visibility() == Visibility::Seen; }

  std::string str() const {
    std::string out = "/";
    out += name_of(visibility());
    out += '/';
    out += name_of(aspect());
    out += '/';
    out += name_of(relation());
    return out;
  }

  friend constexpr bool operator==(CategoryPath, CategoryPath) = default;
  friend constexpr auto operator<=>(CategoryPath a, CategoryPath b) { return a.index_ <=> b.index_; }

 private:
  constexpr explicit CategoryPath(std::size_t index) : index_(index) {}
  std::size_t index_ = 0;
};

namespace detail {

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from_name(std::string_view name, const std::array<Enum, N>& values) {
  for (Enum e : values) {
    if (name_of(e) == name) return e;
  }
  return std::nullopt;
}

}  // namespace detail

// Case-sensitive parse of "/<Visibility>/<Aspect>/<Relation>".
inline CategoryPath parse_category(std::string_view textual) {
  auto fail = [&](const char* why) {
    return Error(ErrorKind::InvalidCategory, std::string(why) + ": '" + std::string(textual) + "'");
  };
  if (textual.empty() || textual.front() != '/') throw fail("category must start with '/'");
  auto parts = text::split(textual.substr(1), '/');
  if (parts.size() != 3) throw fail("expected three segments");
  auto v = detail::enum_from_name(parts[0], kAllVisibilities);
  auto a = detail::enum_from_name(parts[1], kAllAspects);
  auto r = detail::enum_from_name(parts[2], kAllRelations);
  if (!v || !a || !r) throw fail("unknown segment name");
  auto path = CategoryPath::make(*v, *a, *r);
  if (!path) throw fail("combination is not a taxonomy leaf");
  return *path;
}

// External KB relation label to its Unseen leaf. Only the six relations with
// an Unseen leaf are admitted.
inline std::optional<CategoryPath> kb_relation_to_category(std::string_view relation_name) {
  static constexpr std::array kUnseen{
      std::pair{Relation::HasProperty, Aspect::Property}, std::pair{Relation::CreatedBy, Aspect::Property},
      std::pair{Relation::LocatedNear, Aspect::Space},    std::pair{Relation::CapableOf, Aspect::Action},
      std::pair{Relation::UsedFor, Aspect::Action},       std::pair{Relation::ReceivesAction, Aspect::Action},
  };
  for (auto [rel, aspect] : kUnseen) {
    if (name_of(rel) == relation_name) return CategoryPath::make(Visibility::Unseen, aspect, rel);
  }
  return std::nullopt;
}

// Part-of-speech based mapping of scene-graph predicates onto the Seen layer.
// For verbs with Voice::None the voice follows the tag (VBN passive, else active).
inline std::optional<CategoryPath> pos_to_seen_category(PosTag pos, Voice voice) {
  switch (pos) {
    case PosTag::ADJ:
      return CategoryPath::make(Visibility::Seen, Aspect::Property, Relation::HasProperty);
    case PosTag::PREP:
      return CategoryPath::make(Visibility::Seen, Aspect::Space, Relation::Relatedness);
    case PosTag::VB:
    case PosTag::VBG:
    case PosTag::VBN: {
      if (voice == Voice::None) voice = pos == PosTag::VBN ? Voice::Passive : Voice::Active;
      auto rel = voice == Voice::Passive ? Relation::ReceivesAction : Relation::CapableOf;
      return CategoryPath::make(Visibility::Seen, Aspect::Action, rel);
    }
    default:
      return std::nullopt;
  }
}

namespace categories {
inline constexpr CategoryPath kSeenHasProperty = *CategoryPath::make(Visibility::Seen, Aspect::Property, Relation::HasProperty);
inline constexpr CategoryPath kSeenLocatedNear = *CategoryPath::make(Visibility::Seen, Aspect::Space, Relation::LocatedNear);
inline constexpr CategoryPath kSeenRelatedness = *CategoryPath::make(Visibility::Seen, Aspect::Space, Relation::Relatedness);
inline constexpr CategoryPath kSeenCapableOf = *CategoryPath::make(Visibility::Seen, Aspect::Action, Relation::CapableOf);
inline constexpr CategoryPath kSeenReceivesAction = *CategoryPath::make(Visibility::Seen, Aspect::Action, Relation::ReceivesAction);
}  // namespace categories

}  // namespace viscom
