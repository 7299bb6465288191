#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "koop/csv.hpp"
#include "koop/koopman.hpp"
#include "koop/version.hpp"

namespace koop {

namespace detail {

inline std::vector<std::string> indexed_names(const std::string& prefix, Index n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
    return names;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << text;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace detail

/// Persist a fitted model as a directory: K.csv (operator entries, exact at
/// double precision), dictionary.json, metadata.json.
inline void save_model(const KoopmanModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_csv(dir / "K.csv", model.K, detail::indexed_names("k", model.K.cols()));
    detail::write_text_atomic(dir / "dictionary.json", to_json(model.dict).dump(2) + "\n");

    nlohmann::json meta;
    meta["method"] = to_string(model.method);
    meta["residual_rel"] = model.residual_rel;
    meta["fit_seconds"] = model.fit_seconds;
    meta["operator_dim"] = model.K.rows();
    meta["version"] = version();
    detail::write_text_atomic(dir / "metadata.json", meta.dump(2) + "\n");
}

inline KoopmanModel load_model(const std::filesystem::path& dir) {
    const std::filesystem::path k_path = dir / "K.csv";
    if (!std::filesystem::exists(k_path))
        throw IoError("model directory '" + dir.string() + "' has no K.csv");
    TimeSeriesTable k_table = read_csv(k_path);

    std::ifstream dict_in(dir / "dictionary.json");
    if (!dict_in) throw IoError("cannot open '" + (dir / "dictionary.json").string() + "'");
    nlohmann::json dict_json = nlohmann::json::parse(dict_in);

    std::ifstream meta_in(dir / "metadata.json");
    if (!meta_in) throw IoError("cannot open '" + (dir / "metadata.json").string() + "'");
    nlohmann::json meta = nlohmann::json::parse(meta_in);

    KoopmanModel model;
    model.K = k_table.samples;
    if (model.K.rows() != model.K.cols())
        throw DataError("model K.csv is not square");
    model.dict = dictionary_from_json(dict_json);
    model.method = fit_method_from_string(meta.at("method").get<std::string>());
    model.residual_rel = meta.at("residual_rel").get<double>();
    model.fit_seconds = meta.at("fit_seconds").get<double>();
    return model;
}

} // namespace koop
