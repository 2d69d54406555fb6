#pragma once

// Rule-based tagging and parsing of short region phrases.
//
// Grammar (tokens are tags):
//   Phrase := NP
//           | NP PREP+ NP                   PP_PHRASE
//           | NP VBG NP? (PREP+ NP)?        VP_PHRASE, active
//           | NP VBN (PREP+ NP)?            VP_PHRASE, passive ("hit by a car")
//   NP     := DET? (ADJ | VBG)* NOUN+
//
// A run of nouns is one head only when the compound is a known noun
// ("traffic light"); otherwise the last noun is the head ("city street" ->
// "street").

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viscom/error.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/taxonomy.hpp"
#include "viscom/text.hpp"

namespace viscom {

struct TaggedToken {
  std::string surface;
  std::string lemma;
  PosTag pos = PosTag::NOUN;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

enum class PhraseKind { NP, PP_PHRASE, VP_PHRASE };

struct VerbPayload {
  std::string lemma;
  std::string surface;
  PosTag pos = PosTag::VBG;  // VBG or VBN
  std::string complement;    // the simplified verb phrase used as triple tail

  friend bool operator==(const VerbPayload&, const VerbPayload&) = default;
};

struct PhraseParse {
  PhraseKind kind = PhraseKind::NP;
  std::string root_noun;
  std::vector<std::string> adjectives;
  std::vector<std::string> participles;  // VBG modifiers inside the root NP
  std::optional<std::string> prep;
  std::optional<std::string> tail_head_noun;
  std::optional<VerbPayload> verb;
  std::vector<TaggedToken> tokens;

  friend bool operator==(const PhraseParse&, const PhraseParse&) = default;
};

namespace detail {

inline bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

// Lowercase, drop "'s", replace punctuation with spaces; hyphens between word
// characters are kept ("t-shirt").
inline std::vector<std::string> raw_tokens(std::string_view phrase) {
  std::string lowered = text::to_lower(phrase);
  std::string cleaned;
  cleaned.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    char c = lowered[i];
    if (is_word_byte(c)) {
      cleaned.push_back(c);
    } else if (c == '-' && i > 0 && i + 1 < lowered.size() && is_word_byte(lowered[i - 1]) &&
               is_word_byte(lowered[i + 1])) {
      cleaned.push_back(c);
    } else if (c == '\'' && i + 1 < lowered.size() && lowered[i + 1] == 's' &&
               (i + 2 == lowered.size() || !is_word_byte(lowered[i + 2]))) {
      ++i;  // possessive
      cleaned.push_back(' ');
    } else if (c == '\'') {
      // contractions and quotes
    } else {
      cleaned.push_back(' ');
    }
  }
  return text::split_words(cleaned);
}

inline bool all_digits(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Tag from the word alone. A word listed as an adjective that could also be a
// noun or a participle carries its alternative tag; the positional pass keeps
// ADJ only when an adjective or noun follows.
struct LexicalTag {
  PosTag pos;
  std::optional<PosTag> non_adjective;
};

inline std::optional<PosTag> participle_tag(const std::string& w, const Lexicon& lex) {
  if (lex.irregular_participles.contains(w)) return text::ends_with(w, "ing") ? PosTag::VBG : PosTag::VBN;
  if (morph::looks_like_gerund(w)) return PosTag::VBG;
  if (morph::looks_like_past_participle(w)) return PosTag::VBN;
  return std::nullopt;
}

inline LexicalTag lexical_tag(const std::string& w, const Lexicon& lex) {
  if (lex.determiners.contains(w) || all_digits(w)) return {PosTag::DET, std::nullopt};
  if (lex.prepositions.contains(w)) return {PosTag::PREP, std::nullopt};
  if (lex.function_words.contains(w)) return {PosTag::OTHER, std::nullopt};
  const bool adj = lex.adjectives.contains(w);
  const bool noun = lex.known_nouns.contains(w) || lex.irregular_plurals.contains(w);
  if (adj && noun) return {PosTag::ADJ, PosTag::NOUN};
  if (lex.irregular_participles.contains(w)) {
    auto part = participle_tag(w, lex);
    return adj ? LexicalTag{PosTag::ADJ, part} : LexicalTag{*part, std::nullopt};
  }
  if (adj) return {PosTag::ADJ, participle_tag(w, lex)};
  if (noun) return {PosTag::NOUN, std::nullopt};
  if (lex.verbs.contains(w)) return {PosTag::VB, std::nullopt};
  if (auto part = participle_tag(w, lex)) return {*part, std::nullopt};
  return {PosTag::NOUN, std::nullopt};
}

inline std::string lemma_for(const std::string& w, PosTag pos, const Lexicon& lex) {
  switch (pos) {
    case PosTag::NOUN: return morph::lemmatize_word(w, lex);
    case PosTag::VB: {
      auto it = lex.verbs.find(w);
      return it != lex.verbs.end() ? it->second : w;
    }
    case PosTag::VBG:
    case PosTag::VBN: return morph::participle_lemma(w, lex);
    default: return w;
  }
}

}  // namespace detail

inline std::vector<TaggedToken> tokenize_and_tag(std::string_view phrase, const Lexicon& lex) {
  auto words = detail::raw_tokens(phrase);
  if (words.empty()) throw Error(ErrorKind::EmptyPhrase, "phrase has no tokens");

  // Greedy longest match of multi-word prepositions ("in front of").
  std::vector<std::string> merged;
  for (std::size_t i = 0; i < words.size();) {
    std::size_t taken = 1;
    for (std::size_t len = std::min(lex.max_prep_words, words.size() - i); len >= 2; --len) {
      std::vector<std::string> span(words.begin() + static_cast<std::ptrdiff_t>(i),
                                    words.begin() + static_cast<std::ptrdiff_t>(i + len));
      std::string candidate = text::join(span, " ");
      if (lex.prepositions.contains(candidate)) {
        merged.push_back(std::move(candidate));
        taken = len;
        break;
      }
    }
    if (taken == 1) merged.push_back(words[i]);
    i += taken;
  }

  std::vector<detail::LexicalTag> lexical;
  lexical.reserve(merged.size());
  for (const auto& w : merged) lexical.push_back(detail::lexical_tag(w, lex));

  // Right to left so an ambiguous word sees the resolved tag of its successor.
  std::vector<TaggedToken> tokens(merged.size());
  for (std::size_t k = merged.size(); k-- > 0;) {
    PosTag pos = lexical[k].pos;
    if (pos == PosTag::ADJ && lexical[k].non_adjective) {
      bool next_nominal = k + 1 < merged.size() &&
                          (tokens[k + 1].pos == PosTag::ADJ || tokens[k + 1].pos == PosTag::NOUN);
      if (!next_nominal) pos = *lexical[k].non_adjective;
    }
    tokens[k].surface = merged[k];
    tokens[k].pos = pos;
    tokens[k].lemma = detail::lemma_for(merged[k], pos, lex);
  }
  return tokens;
}

namespace detail {

struct NpSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last noun
  std::size_t mod_begin = 0;
  std::size_t noun_begin = 0;
};

// Matches DET? (ADJ|VBG)* NOUN+ starting at `pos`.
inline std::optional<NpSpan> match_np(std::span<const TaggedToken> t, std::size_t pos) {
  NpSpan np{pos, pos, pos};
  std::size_t i = pos;
  if (i < t.size() && t[i].pos == PosTag::DET) ++i;
  np.mod_begin = i;
  std::size_t mod_end = i;
  while (mod_end < t.size() && (t[mod_end].pos == PosTag::ADJ || t[mod_end].pos == PosTag::VBG)) ++mod_end;
  if (mod_end >= t.size() || t[mod_end].pos != PosTag::NOUN) return std::nullopt;
  np.noun_begin = mod_end;
  std::size_t j = mod_end;
  while (j < t.size() && t[j].pos == PosTag::NOUN) ++j;
  np.end = j;
  return np;
}

struct Head {
  std::string text;
  std::size_t start = 0;  // first token of the head
};

// Longest known compound ending at the last noun, possibly starting inside the
// modifier run ("living room"); otherwise the last noun alone.
inline Head find_head(std::span<const TaggedToken> t, const NpSpan& np, const Lexicon& lex) {
  const std::size_t last = np.end - 1;
  for (std::size_t s = np.mod_begin; s < last; ++s) {
    std::vector<std::string> parts;
    for (std::size_t k = s; k < last; ++k) parts.push_back(t[k].surface);
    parts.push_back(t[last].lemma);
    std::string compound = text::join(parts, " ");
    if (lex.is_noun(compound)) return {compound, s};
    parts.back() = t[last].surface;
    std::string surface_compound = text::join(parts, " ");
    if (lex.is_noun(surface_compound) || lex.irregular_plurals.contains(surface_compound)) {
      return {lemmatize(surface_compound, lex), s};
    }
  }
  return {t[last].lemma, last};
}

inline std::string head_of(std::span<const TaggedToken> t, const NpSpan& np, const Lexicon& lex) {
  return find_head(t, np, lex).text;
}

// PREP+ run starting at pos; returns the joined preposition and the end index.
inline std::optional<std::pair<std::string, std::size_t>> match_preps(std::span<const TaggedToken> t,
                                                                        std::size_t pos) {
  std::vector<std::string> words;
  while (pos < t.size() && t[pos].pos == PosTag::PREP) words.push_back(t[pos++].surface);
  if (words.empty()) return std::nullopt;
  return std::pair{text::join(words, " "), pos};
}

}  // namespace detail

// Head noun of a token span that is exactly one NP; determiners and
// modifiers are dropped ("the yellow car" -> "car").
inline std::string simplify_np(std::span<const TaggedToken> tokens, const Lexicon& lex) {
  auto np = detail::match_np(tokens, 0);
  if (!np || np->end != tokens.size()) throw Error(ErrorKind::NotAnNP, "token span is not a noun phrase");
  return detail::head_of(tokens, *np, lex);
}

// Returns nullopt when the tokens fall outside the grammar.
inline std::optional<PhraseParse> parse_region_phrase(std::span<const TaggedToken> t, const Lexicon& lex) {
  auto root = detail::match_np(t, 0);
  if (!root) return std::nullopt;

  PhraseParse parse;
  parse.tokens.assign(t.begin(), t.end());
  auto head = detail::find_head(t, *root, lex);
  parse.root_noun = head.text;
  for (std::size_t k = root->mod_begin; k < std::min(root->noun_begin, head.start); ++k) {
    if (t[k].pos == PosTag::ADJ) parse.adjectives.push_back(t[k].lemma);
    if (t[k].pos == PosTag::VBG) parse.participles.push_back(t[k].lemma);
  }

  std::size_t pos = root->end;
  if (pos == t.size()) {
    parse.kind = PhraseKind::NP;
    return parse;
  }

  if (t[pos].pos == PosTag::PREP) {
    auto preps = detail::match_preps(t, pos);
    auto tail = detail::match_np(t, preps->second);
    if (!tail || tail->end != t.size()) return std::nullopt;
    parse.kind = PhraseKind::PP_PHRASE;
    parse.prep = preps->first;
    parse.tail_head_noun = detail::head_of(t, *tail, lex);
    return parse;
  }

  if (t[pos].pos == PosTag::VBG) {
    VerbPayload verb{t[pos].lemma, t[pos].surface, PosTag::VBG, t[pos].surface};
    ++pos;
    if (auto object = detail::match_np(t, pos)) {
      verb.complement += " " + detail::head_of(t, *object, lex);
      pos = object->end;
    }
    if (pos < t.size()) {
      auto preps = detail::match_preps(t, pos);
      if (!preps) return std::nullopt;
      auto obj = detail::match_np(t, preps->second);
      if (!obj) return std::nullopt;
      verb.complement += " " + preps->first + " " + detail::head_of(t, *obj, lex);
      pos = obj->end;
    }
    if (pos != t.size()) return std::nullopt;
    parse.kind = PhraseKind::VP_PHRASE;
    parse.verb = std::move(verb);
    return parse;
  }

  if (t[pos].pos == PosTag::VBN) {
    VerbPayload verb{t[pos].lemma, t[pos].surface, PosTag::VBN, t[pos].surface};
    ++pos;
    if (pos < t.size()) {
      auto preps = detail::match_preps(t, pos);
      if (!preps) return std::nullopt;
      auto agent = detail::match_np(t, preps->second);
      if (!agent || agent->end != t.size()) return std::nullopt;
      // A "by" agent keeps its determiner ("hit by a car"); other complements
      // are simplified like active ones ("parked on street").
      verb.complement += " " + preps->first;
      if (preps->first == "by" && t[agent->begin].pos == PosTag::DET) {
        verb.complement += " " + t[agent->begin].surface;
      }
      verb.complement += " " + detail::head_of(t, *agent, lex);
      pos = agent->end;
    }
    parse.kind = PhraseKind::VP_PHRASE;
    parse.verb = std::move(verb);
    return parse;
  }

  return std::nullopt;
}

}  // namespace viscom
