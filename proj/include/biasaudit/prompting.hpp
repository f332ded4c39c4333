#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biasaudit/types.hpp"

namespace biasaudit {

enum class PromptMode { Implicit, Explicit };

std::string_view to_string(PromptMode m);
std::optional<PromptMode> prompt_mode_from_string(std::string_view s);

enum class Role { system, user, assistant };

std::string_view to_string(Role r);

struct Turn {
    Role role = Role::user;
    std::string content;

    bool operator==(const Turn&) const = default;
};

// Symbol->choice binding for one presented item. symbols are consecutive
// letters from 'A' in presentation order; position j presents
// item.choices[permutation[j]].
struct Binding {
    std::vector<char> symbols;
    std::vector<int> permutation;

    // Original choice index for a symbol, or -1 if the symbol is not bound.
    int original_index(char symbol) const;
    // The symbol presenting the (unique) choice with this gold label, or 0.
    char symbol_for_gold(const McsbItem& item, GoldLabel gold) const;
};

struct Transcript {
    std::vector<Turn> turns;
    Binding binding;
    std::string item_id;
    PromptMode mode = PromptMode::Implicit;
};

// Deterministic choice-order permutation for (item_id, seed, n). Seed 0 is
// reserved: it returns the identity order, which reproduces the golden
// transcripts. Uniform over permutations as the seed varies. n < 2 throws.
std::vector<int> permutation_for(std::string_view item_id, std::uint64_t seed, int n);

struct TranscriptOptions {
    // Intrasentence contexts are fill-in templates (they contain BLANK);
    // by default their context turn is omitted.
    bool include_blank_context = false;
};

// Builds the multi-turn symbol-binding transcript for an item. Explicit mode
// asks which prompt is a stereotype; implicit mode never mentions
// stereotypes. perm must be a permutation of 0..|choices|-1.
Transcript build_transcript(const McsbItem& item, PromptMode mode, std::vector<int> perm,
                            const TranscriptOptions& options = {});

// Chat-messages wire shape: [{"role": ..., "content": ...}, ...].
nlohmann::json turns_to_messages_json(const std::vector<Turn>& turns);

}  // namespace biasaudit
