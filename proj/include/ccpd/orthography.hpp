#pragma once

// Arabic letters, diacritic labels, and the marked-text <-> Sentence mapping.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccpd/error.hpp"
#include "ccpd/mask.hpp"

namespace ccpd {

// One diacritic outcome per letter. Shadda combinations are single labels so
// every letter carries exactly one prediction target.
enum class Label : std::uint8_t {
  None = 0,
  Fatha,
  Fathatain,
  Damma,
  Dammatain,
  Kasra,
  Kasratain,
  Sukun,
  Shadda,
  ShaddaFatha,
  ShaddaFathatain,
  ShaddaDamma,
  ShaddaDammatain,
  ShaddaKasra,
  ShaddaKasratain,
};

inline constexpr std::size_t kNumLabels = 15;

inline constexpr char32_t kFathatain = 0x064B;
inline constexpr char32_t kDammatain = 0x064C;
inline constexpr char32_t kKasratain = 0x064D;
inline constexpr char32_t kFatha = 0x064E;
inline constexpr char32_t kDamma = 0x064F;
inline constexpr char32_t kKasra = 0x0650;
inline constexpr char32_t kShadda = 0x0651;
inline constexpr char32_t kSukun = 0x0652;

constexpr std::size_t label_index(Label l) noexcept { return static_cast<std::size_t>(l); }
constexpr Label label_at(std::size_t i) noexcept { return static_cast<Label>(i); }

namespace detail {

struct LabelInfo {
  std::string_view name;
  std::u32string_view marks;  // shadda first for combinations
};

inline constexpr std::array<LabelInfo, kNumLabels> kLabelTable{{
    {"NONE", U""},
    {"FATHA", U"\u064E"},
    {"FATHATAIN", U"\u064B"},
    {"DAMMA", U"\u064F"},
    {"DAMMATAIN", U"\u064C"},
    {"KASRA", U"\u0650"},
    {"KASRATAIN", U"\u064D"},
    {"SUKUN", U"\u0652"},
    {"SHADDA", U"\u0651"},
    {"SHADDA_FATHA", U"\u0651\u064E"},
    {"SHADDA_FATHATAIN", U"\u0651\u064B"},
    {"SHADDA_DAMMA", U"\u0651\u064F"},
    {"SHADDA_DAMMATAIN", U"\u0651\u064C"},
    {"SHADDA_KASRA", U"\u0651\u0650"},
    {"SHADDA_KASRATAIN", U"\u0651\u064D"},
}};

}  // namespace detail

constexpr std::u32string_view label_marks(Label l) noexcept { return detail::kLabelTable[label_index(l)].marks; }
constexpr std::string_view label_name(Label l) noexcept { return detail::kLabelTable[label_index(l)].name; }

// Label formed by an optional shadda plus at most one other mark (0 for none).
// Sukun cannot combine with shadda.
constexpr std::optional<Label> label_from_marks(bool shadda, char32_t vowel) noexcept {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    auto marks = detail::kLabelTable[i].marks;
    bool has_shadda = !marks.empty() && marks.front() == kShadda;
    char32_t rest = 0;
    if (marks.size() == 2) rest = marks[1];
    else if (marks.size() == 1 && !has_shadda) rest = marks[0];
    if (has_shadda == shadda && rest == vowel) return label_at(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Codepoints

enum class CodepointClass { ArabicLetter, DiacriticMark, Whitespace, Other };

constexpr bool is_unicode_whitespace(char32_t cp) noexcept {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

constexpr CodepointClass classify_codepoint(char32_t cp) noexcept {
  if ((cp >= 0x0621 && cp <= 0x064A) || cp == 0x0671) return CodepointClass::ArabicLetter;
  if (cp >= 0x064B && cp <= 0x0652) return CodepointClass::DiacriticMark;
  if (is_unicode_whitespace(cp)) return CodepointClass::Whitespace;
  return CodepointClass::Other;
}

constexpr bool is_arabic_letter(char32_t cp) noexcept {
  return classify_codepoint(cp) == CodepointClass::ArabicLetter;
}
constexpr bool is_diacritic(char32_t cp) noexcept { return classify_codepoint(cp) == CodepointClass::DiacriticMark; }

// Malformed sequences decode to U+FFFD, one per offending byte.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) { len = 1; cp = b0; }
    else if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    bool ok = len != 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlongs, surrogates, out-of-range
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (ok && (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

// ---------------------------------------------------------------------------
// Sentences

struct MarkedLetter {
  char32_t base = 0;
  Label diac = Label::None;

  friend bool operator==(const MarkedLetter&, const MarkedLetter&) = default;
};

struct Word {
  std::vector<MarkedLetter> letters;

  std::size_t size() const noexcept { return letters.size(); }

  // Base letters only, UTF-8. Used as the lexicon key.
  std::string plain() const {
    std::string out;
    for (const auto& l : letters) append_utf8(out, l.base);
    return out;
  }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(letters.size());
    for (const auto& l : letters) out.push_back(l.diac);
    return out;
  }

  friend bool operator==(const Word&, const Word&) = default;
};

// separators[k] is the raw text preceding words[k]; the last one trails the
// final word. Always words.size() + 1 entries.
struct Sentence {
  std::vector<Word> words;
  std::vector<std::string> separators{std::string{}};

  std::size_t letter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& w : words) n += w.size();
    return n;
  }

  std::vector<std::string> plain_words() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.plain());
    return out;
  }

  // Flattened labels in reading order.
  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(letter_count());
    for (const auto& w : words)
      for (const auto& l : w.letters) out.push_back(l.diac);
    return out;
  }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class ParseMode { Strict, Lenient };

struct ParseStats {
  std::size_t warnings = 0;  // marks dropped in lenient mode
};

namespace detail {

// Accumulates marks on a single letter.
struct MarkState {
  bool shadda = false;
  char32_t vowel = 0;

  // False when `mark` cannot join the marks seen so far.
  bool add(char32_t mark) {
    bool s = shadda;
    char32_t v = vowel;
    if (mark == kShadda) {
      s = true;
    } else if (v == 0 || v == mark) {
      v = mark;
    } else {
      return false;
    }
    if (!label_from_marks(s, v)) return false;
    shadda = s;
    vowel = v;
    return true;
  }

  Label label() const { return *label_from_marks(shadda, vowel); }
};

}  // namespace detail

// Diacritics attach to the letter they directly follow (other marks in
// between are allowed). Shadda+vowel is accepted in either order and repeated
// identical marks collapse. Anything that is neither a letter nor a mark ends
// the current word and is kept verbatim as separator text.
inline Sentence parse_marked_text(std::string_view text, ParseMode mode = ParseMode::Lenient,
                                  ParseStats* stats = nullptr) {
  const std::u32string cps = decode_utf8(text);
  Sentence s;
  s.separators.clear();
  std::string sep;
  Word word;
  detail::MarkState state;
  bool in_word = false;

  auto reject = [&](ParseError::Kind kind, std::size_t pos) {
    if (mode == ParseMode::Strict) throw ParseError(kind, pos);
    if (stats) ++stats->warnings;
  };
  auto close_word = [&] {
    if (!in_word) return;
    word.letters.back().diac = state.label();
    s.words.push_back(std::move(word));
    word = Word{};
    in_word = false;
  };

  for (std::size_t pos = 0; pos < cps.size(); ++pos) {
    const char32_t cp = cps[pos];
    switch (classify_codepoint(cp)) {
      case CodepointClass::ArabicLetter:
        if (in_word) {
          word.letters.back().diac = state.label();
        } else {
          s.separators.push_back(std::move(sep));
          sep.clear();
          in_word = true;
        }
        word.letters.push_back({cp, Label::None});
        state = {};
        break;
      case CodepointClass::DiacriticMark:
        if (!in_word) reject(ParseError::Kind::DanglingDiacritic, pos);
        else if (!state.add(cp)) reject(ParseError::Kind::ConflictingMarks, pos);
        break;
      default:
        close_word();
        append_utf8(sep, cp);
        break;
    }
  }
  close_word();
  s.separators.push_back(std::move(sep));
  return s;
}

inline std::string strip(const Sentence& s) {
  std::string out = s.separators.front();
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    for (const auto& l : s.words[i].letters) append_utf8(out, l.base);
    out += s.separators[i + 1];
  }
  return out;
}

inline std::string render(const Sentence& s, const SelectionMask& mask) {
  if (mask.size() != s.letter_count())
    throw ShapeError("mask length " + std::to_string(mask.size()) + " does not match letter count " +
                     std::to_string(s.letter_count()));
  std::string out = s.separators.front();
  std::size_t j = 0;
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    for (const auto& l : s.words[i].letters) {
      append_utf8(out, l.base);
      if (mask[j++])
        for (char32_t m : label_marks(l.diac)) append_utf8(out, m);
    }
    out += s.separators[i + 1];
  }
  return out;
}

inline std::string render_full(const Sentence& s) {
  return render(s, SelectionMask::all(s.letter_count(), true));
}

// Drops codepoints that are neither Arabic letters, diacritics, nor
// whitespace; collapses whitespace runs to one space and trims the ends;
// rewrites each well-formed mark cluster in canonical (shadda-first) order.
// Dangling or conflicting clusters are left as-is so a strict parse can still
// report them.
inline std::string canonicalize(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::u32string kept;
  kept.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    switch (classify_codepoint(cp)) {
      case CodepointClass::Other:
        break;
      case CodepointClass::Whitespace:
        pending_space = !kept.empty();
        break;
      default:
        if (pending_space) kept.push_back(U' ');
        pending_space = false;
        kept.push_back(cp);
        break;
    }
  }

  std::string out;
  out.reserve(kept.size() * 2);
  for (std::size_t i = 0; i < kept.size();) {
    const char32_t cp = kept[i];
    if (!is_diacritic(cp)) {
      append_utf8(out, cp);
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < kept.size() && is_diacritic(kept[end])) ++end;
    const bool attached = i > 0 && is_arabic_letter(kept[i - 1]);
    detail::MarkState state;
    bool valid = attached;
    for (std::size_t k = i; valid && k < end; ++k) valid = state.add(kept[k]);
    if (valid) {
      for (char32_t m : label_marks(state.label())) append_utf8(out, m);
    } else {
      for (std::size_t k = i; k < end; ++k) append_utf8(out, kept[k]);
    }
    i = end;
  }
  return out;
}

}  // namespace ccpd
