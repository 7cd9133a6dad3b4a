#include "ossrisk/manifest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "ossrisk/error.hpp"

namespace ossrisk {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string(), 0, 0, "cannot open file");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    inputs.push_back({role, path.filename().string(), sha256_file(path)});
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "ossrisk";
    j["tool_version"] = tool_version;
    j["command"] = command;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& d : inputs) in.push_back({{"role", d.role}, {"file", d.file}, {"sha256", d.sha256}});
    j["window"] = {{"start", window_start ? nlohmann::ordered_json(*window_start) : nullptr},
                   {"end", window_end ? nlohmann::ordered_json(*window_end) : nullptr}};
    j["raw_commits"] = raw_commits;
    j["production"] = production;
    j["cd_exponent"] = contributor_exponent;
    j["tolerance"] = tolerance;
    j["max_iter"] = max_iter;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nullptr;
    for (const auto& [key, value] : extra.items()) j[key] = value;
    return j;
}

} // namespace ossrisk
