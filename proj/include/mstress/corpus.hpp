#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mstress/errors.hpp"
#include "mstress/rng.hpp"

namespace mstress {

using TokenId = std::int32_t;
using Tokens = std::vector<TokenId>;

struct Turn {
  int speaker = 0;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::vector<Turn> turns;

  bool operator==(const Dialogue&) const = default;
};

// Throws ValidationError unless the dialogue has >= 2 turns, speakers
// alternate between exactly two ids, and every turn has token content.
void validate_dialogue(const Dialogue& dialogue);

// Lowercases and splits on whitespace; every punctuation character becomes
// its own token. "I love music." -> ["i", "love", "music", "."].
std::vector<std::string> tokenize(std::string_view text);

// Joins tokens with single spaces. tokenize(detokenize(toks)) == toks.
std::string detokenize(const std::vector<std::string>& tokens);

class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr std::size_t kNumReserved = 4;

  Vocabulary();

  // Most frequent surface tokens first (ties broken lexicographically),
  // capped at max_types non-reserved entries; everything else encodes to UNK.
  static Vocabulary build(const std::vector<Dialogue>& dialogues,
                          std::size_t max_types = 2000);

  std::size_t size() const { return surfaces_.size(); }
  TokenId id_of(const std::string& token) const;
  const std::string& surface(TokenId id) const;
  bool is_reserved(TokenId id) const { return id >= 0 && id < static_cast<TokenId>(kNumReserved); }

  Tokens encode(const std::vector<std::string>& tokens) const;
  Tokens encode_text(std::string_view text) const;
  std::vector<std::string> decode(const Tokens& ids) const;
  // Rendering for reports: surfaces joined by spaces, reserved ids skipped.
  std::string render(const Tokens& ids) const;

  // Content hash; embedded in checkpoints so artifacts from different
  // corpora cannot be mixed silently.
  std::uint64_t hash() const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  void add_surface(std::string token);

  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct ContextResponsePair {
  std::vector<Tokens> context;  // most recent utterances, oldest first
  Tokens response;
  bool gold = true;
};

// JSONL, one dialogue per line:
//   {"dialogue_id": "...", "turns": [{"speaker": 0, "text": "..."}, ...]}
std::vector<Dialogue> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path,
                 const std::vector<Dialogue>& dialogues);

// One pair per turn t >= 1: context is the last min(t, context_window)
// turns before t, response is turn t.
std::vector<ContextResponsePair> make_pairs(
    const std::vector<Dialogue>& dialogues, const Vocabulary& vocab,
    int context_window);

struct ContrastTriple {
  std::vector<Tokens> context;
  Tokens positive;
  Tokens negative;
};

// Pairs each context with its gold response and the gold response of a
// uniformly sampled different pair whose content differs from the positive.
std::vector<ContrastTriple> negative_sample(
    const std::vector<ContextResponsePair>& pairs, Rng& rng);

// Template-bank dialogues (greetings, hobby exchanges, sympathy closers)
// with slot-filled nouns; <= 500 distinct surface tokens, two strictly
// alternating speakers.
std::vector<Dialogue> generate_synthetic_corpus(std::uint64_t seed,
                                                std::size_t n_dialogues);

}  // namespace mstress
