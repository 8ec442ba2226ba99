// SPDX-License-Identifier: Apache-2.0
//
// radiomotion: dynamic radio-map sequence generation and forecasting
// Copyright (C) 2026 The radiomotion authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "radiomotion/checkpoint.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

namespace radiomotion
{

namespace fs = std::filesystem;

namespace
{
fs::path tensor_file(const std::string &name)
{
    return name + ".rmm";
}

nlohmann::json read_manifest(const fs::path &dir)
{
    std::ifstream in(dir / "manifest.json");
    if (!in)
        throw std::runtime_error("cannot open checkpoint manifest " + (dir / "manifest.json").string());
    return nlohmann::json::parse(in);
}
} // namespace

void save_checkpoint(const fs::path &dir, std::span<const NamedTensor<float>> tensors, const nlohmann::json &metadata)
{
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = "radiomotion-checkpoint-1";
    manifest["metadata"] = metadata;
    manifest["tensors"] = nlohmann::json::array();
    for (const NamedTensor<float> &nt : tensors)
    {
        const ad::Tensor<float> &t = *nt.tensor;
        const auto rows = static_cast<std::uint32_t>(t.rank() ? t.dim(0) : 1);
        const auto cols = static_cast<std::uint32_t>(rows ? t.size() / rows : 0);
        write_rmm(dir / tensor_file(nt.name), rows, cols, t.data());
        manifest["tensors"].push_back({{"name", nt.name}, {"shape", t.shape()}, {"file", tensor_file(nt.name)}});
    }
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("failed writing " + (dir / "manifest.json").string());
}

nlohmann::json load_checkpoint(const fs::path &dir, std::span<const NamedTensor<float>> tensors)
{
    nlohmann::json manifest = read_manifest(dir);
    std::map<std::string, nlohmann::json> entries;
    for (const auto &e : manifest.at("tensors"))
        entries[e.at("name").get<std::string>()] = e;
    for (const NamedTensor<float> &nt : tensors)
    {
        auto it = entries.find(nt.name);
        if (it == entries.end())
            throw std::runtime_error("checkpoint " + dir.string() + " lacks tensor " + nt.name);
        auto shape = it->second.at("shape").get<ad::Shape>();
        if (shape != nt.tensor->shape())
            throw std::runtime_error("checkpoint tensor " + nt.name + " has shape " + ad::shape_string(shape) +
                                     ", expected " + ad::shape_string(nt.tensor->shape()));
        std::vector<float> data = read_rmm(dir / it->second.at("file").get<std::string>());
        if (data.size() != nt.tensor->size())
            throw std::runtime_error("checkpoint tensor " + nt.name + " has wrong length");
        std::copy(data.begin(), data.end(), nt.tensor->data().begin());
    }
    return manifest.at("metadata");
}

nlohmann::json read_checkpoint_metadata(const fs::path &dir)
{
    return read_manifest(dir).at("metadata");
}

} // namespace radiomotion
