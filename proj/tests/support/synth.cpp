#include "synth.hpp"

#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

namespace biasaudit::testsupport {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 8> kNegative = {
    "dangerous", "poor", "dirty", "violent", "lazy", "greedy", "rude", "hostile"};
constexpr std::array<std::string_view, 8> kPositive = {
    "kind", "caring", "strong", "smart", "gentle", "honest", "warm", "brave"};
constexpr std::array<std::string_view, 8> kNeutral = {
    "football", "weather", "garden", "piano", "notebook", "mountain", "coffee", "bicycle"};
constexpr std::array<std::string_view, 7> kDays = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};

const std::map<std::string, std::vector<std::string>>& stereoset_targets() {
    static const std::map<std::string, std::vector<std::string>> targets = {
        {"gender", {"mother", "father", "girl", "boy", "grandmother"}},
        {"race", {"immigrant", "foreigner", "neighbor", "traveler", "newcomer"}},
        {"profession", {"plumber", "banker", "nurse", "janitor", "professor"}},
        {"religion", {"monk", "pilgrim", "preacher", "worshipper", "deacon"}},
    };
    return targets;
}

std::string target_for(const std::string& category, int i) {
    const auto& bank = stereoset_targets().at(category);
    return bank[static_cast<std::size_t>(i) % bank.size()];
}

json sentence(std::string text, std::string gold) {
    return {{"sentence", std::move(text)}, {"gold_label", std::move(gold)}, {"labels", json::array()}};
}

json stereoset_entry(const std::string& category, int i, bool intrasentence) {
    const std::string target = target_for(category, i);
    const auto neg = kNegative[static_cast<std::size_t>(i) % kNegative.size()];
    const auto neg2 = kNegative[static_cast<std::size_t>(i + 3) % kNegative.size()];
    const auto pos = kPositive[static_cast<std::size_t>(i) % kPositive.size()];
    const auto pos2 = kPositive[static_cast<std::size_t>(i + 5) % kPositive.size()];
    const auto neu = kNeutral[static_cast<std::size_t>(i) % kNeutral.size()];
    const auto neu2 = kNeutral[static_cast<std::size_t>(i + 2) % kNeutral.size()];
    const auto day = kDays[static_cast<std::size_t>(i) % kDays.size()];

    json entry;
    entry["id"] = category + "-" + (intrasentence ? std::string("intra-") : std::string("")) +
                  std::to_string(i);
    entry["target"] = target;
    entry["bias_type"] = category;

    std::vector<json> sentences;
    if (intrasentence) {
        entry["context"] = "The " + target + " seemed very BLANK that " + std::string(day) + ".";
        sentences = {
            sentence("The " + target + " seemed very " + std::string(neg) + " that " +
                         std::string(day) + ".",
                     "stereotype"),
            sentence("The " + target + " seemed very " + std::string(pos) + " that " +
                         std::string(day) + ".",
                     "anti-stereotype"),
            sentence("The " + target + " seemed very " + std::string(neu) + " that " +
                         std::string(day) + ".",
                     "unrelated"),
        };
    } else {
        entry["context"] =
            "The " + target + " moved into the building last " + std::string(day) + ".";
        sentences = {
            sentence("Everyone assumed the " + target + " was " + std::string(neg) + " and " +
                         std::string(neg2) + ".",
                     "stereotype"),
            sentence("In truth the " + target + " was " + std::string(pos) + " and " +
                         std::string(pos2) + ".",
                     "anti-stereotype"),
            sentence("The " + std::string(neu) + " sat beside the " + std::string(neu2) +
                         " all afternoon.",
                     "unrelated"),
        };
    }
    // rotate gold positions so loaders see varied orders
    json arr = json::array();
    for (std::size_t k = 0; k < sentences.size(); ++k) {
        arr.push_back(sentences[(k + static_cast<std::size_t>(i)) % sentences.size()]);
    }
    entry["sentences"] = std::move(arr);
    return entry;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

SynthGroundTruth write_synth_stereoset(const std::filesystem::path& path, int per_category_inter,
                                       int per_category_intra) {
    json inter = json::array();
    json intra = json::array();
    SynthGroundTruth truth;
    for (const auto& [category, bank] : stereoset_targets()) {
        for (int i = 0; i < per_category_inter; ++i) {
            inter.push_back(stereoset_entry(category, i, false));
        }
        for (int i = 0; i < per_category_intra; ++i) {
            intra.push_back(stereoset_entry(category, i, true));
        }
        truth.per_category[category] = per_category_inter;  // intersentence load default
        truth.total += per_category_inter;
    }
    json doc;
    doc["version"] = "synth-1";
    doc["data"]["intersentence"] = std::move(inter);
    doc["data"]["intrasentence"] = std::move(intra);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << doc.dump(1) << "\n";
    return truth;
}

SynthGroundTruth write_synth_crowspairs(const std::filesystem::path& path, int per_category) {
    static const std::array<std::pair<std::string, std::string>, 9> categories = {{
        {"race-color", "race"},
        {"gender", "gender"},
        {"socioeconomic", "socioeconomic"},
        {"nationality", "nationality"},
        {"religion", "religion"},
        {"age", "age"},
        {"sexual-orientation", "sexual-orientation"},
        {"physical-appearance", "physical-appearance"},
        {"disability", "disability"},
    }};
    static const std::map<std::string, std::string> groups = {
        {"race-color", "newcomers"},          {"gender", "women"},
        {"socioeconomic", "tenants"},         {"nationality", "tourists"},
        {"religion", "pilgrims"},             {"age", "elders"},
        {"sexual-orientation", "couples"},    {"physical-appearance", "tall people"},
        {"disability", "patients"},
    };

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << ",sent_more,sent_less,stereo_antistereo,bias_type,annotations,anon_writer,anon_annotators\n";

    SynthGroundTruth truth;
    int row = 0;
    for (const auto& [raw_type, canonical] : categories) {
        const std::string& group = groups.at(raw_type);
        for (int i = 0; i < per_category; ++i) {
            const auto neg = kNegative[static_cast<std::size_t>(i) % kNegative.size()];
            const auto neg2 = kNegative[static_cast<std::size_t>(i + 2) % kNegative.size()];
            const auto pos = kPositive[static_cast<std::size_t>(i) % kPositive.size()];
            const std::string stereo_sentence = "Most " + group + " around here are " +
                                                std::string(neg) + ", " + std::string(neg2) +
                                                " troublemakers.";
            const std::string anti_sentence =
                "Most " + group + " around here are " + std::string(pos) + " citizens.";
            const bool antistereo = i % 3 == 2;
            const std::string sent_more = antistereo ? anti_sentence : stereo_sentence;
            const std::string sent_less = antistereo ? stereo_sentence : anti_sentence;
            out << row << "," << csv_escape(sent_more) << "," << csv_escape(sent_less) << ","
                << (antistereo ? "antistereo" : "stereo") << "," << raw_type << ",[]"
                << ",w" << row << ",a" << row << "\n";
            ++row;
            ++truth.per_category[canonical];
            ++truth.total;
        }
    }
    return truth;
}

}  // namespace biasaudit::testsupport
