#include "ncsnaf/checkpoint.hpp"

#include "ncsnaf/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace ncsnaf::checkpoint {

namespace {

constexpr std::array<char, 8> kMagic{'N', 'C', 'S', 'N', 'A', 'F', 'C', 'K'};
constexpr std::array<char, 8> kEndMarker{'K', 'C', 'F', 'A', 'N', 'S', 'C', 'N'};

// Caps guard against allocating absurd buffers from a corrupted header.
constexpr std::uint64_t kMaxLayers = 1024;
constexpr std::uint64_t kMaxParams = std::uint64_t{1} << 32;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <class UInt>
    void uint(UInt value) {
        std::array<char, sizeof(UInt)> bytes{};
        for (std::size_t i = 0; i < sizeof(UInt); ++i)
            bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
        out_.write(bytes.data(), bytes.size());
    }

    void f64(double value) { uint(std::bit_cast<std::uint64_t>(value)); }

    void f64s(const nn::Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            f64(v[i]);
    }

    void raw(const std::array<char, 8>& bytes) { out_.write(bytes.data(), bytes.size()); }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <class UInt>
    UInt uint() {
        std::array<unsigned char, sizeof(UInt)> bytes{};
        fill(reinterpret_cast<char*>(bytes.data()), bytes.size());
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < sizeof(UInt); ++i)
            value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        return static_cast<UInt>(value);
    }

    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

    nn::Vector f64s(std::uint64_t count) {
        nn::Vector v(static_cast<Eigen::Index>(count));
        for (std::uint64_t i = 0; i < count; ++i)
            v[static_cast<Eigen::Index>(i)] = f64();
        return v;
    }

    std::array<char, 8> raw8() {
        std::array<char, 8> bytes{};
        fill(bytes.data(), bytes.size());
        return bytes;
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    void fill(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("checkpoint truncated");
    }

    std::istream& in_;
};

} // namespace

void write(std::ostream& out, const nn::MlpNetwork& net, const nn::AdamState& adam) {
    require_dims(static_cast<std::size_t>(adam.first_moment.size()) == net.parameter_count() &&
                     adam.second_moment.size() == adam.first_moment.size(),
                 "optimizer state does not match network");
    Writer w(out);
    w.raw(kMagic);
    w.uint(kFormatVersion);
    w.uint(static_cast<std::uint32_t>(net.action_dim()));
    const auto& layers = net.layout().layers;
    w.uint(static_cast<std::uint32_t>(layers.size()));
    for (const auto& l : layers) {
        w.uint(static_cast<std::uint32_t>(l.in));
        w.uint(static_cast<std::uint32_t>(l.out));
        w.uint(static_cast<std::uint8_t>(l.activation.kind));
        w.f64(l.activation.weight);
        w.uint(static_cast<std::uint64_t>(l.offset));
    }
    w.uint(static_cast<std::uint64_t>(net.parameter_count()));
    w.f64s(net.parameters());

    w.f64(adam.learning_rate);
    w.f64(adam.beta1);
    w.f64(adam.beta2);
    w.f64(adam.epsilon);
    w.uint(adam.step);
    w.uint(static_cast<std::uint64_t>(adam.first_moment.size()));
    w.f64s(adam.first_moment);
    w.f64s(adam.second_moment);
    w.raw(kEndMarker);
    if (!out)
        throw FormatError("checkpoint write failed");
}

Checkpoint read(std::istream& in) {
    Reader r(in);
    if (r.raw8() != kMagic)
        throw FormatError("checkpoint magic bytes do not match");
    const auto version = r.uint<std::uint32_t>();
    if (version != kFormatVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));

    const auto action_dim = r.uint<std::uint32_t>();
    const auto layer_count = r.uint<std::uint32_t>();
    if (layer_count < 4 || layer_count > kMaxLayers)
        throw FormatError("implausible layer count " + std::to_string(layer_count));

    nn::ParameterLayout layout;
    std::uint64_t expected_offset = 0;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        nn::LayerShape l;
        l.in = r.uint<std::uint32_t>();
        l.out = r.uint<std::uint32_t>();
        const auto kind = r.uint<std::uint8_t>();
        if (kind > static_cast<std::uint8_t>(nn::ActivationKind::ScaledTanh))
            throw FormatError("unknown activation tag " + std::to_string(kind));
        l.activation.kind = static_cast<nn::ActivationKind>(kind);
        l.activation.weight = r.f64();
        l.offset = r.uint<std::uint64_t>();
        if (l.offset != expected_offset)
            throw FormatError("layer table offsets are inconsistent");
        expected_offset += l.size();
        if (expected_offset > kMaxParams)
            throw FormatError("layer table describes too many parameters");
        layout.layers.push_back(l);
    }
    layout.total = expected_offset;

    const auto param_count = r.uint<std::uint64_t>();
    if (param_count != layout.total)
        throw FormatError("parameter count disagrees with layer table");
    nn::Vector params = r.f64s(param_count);

    nn::AdamState adam;
    adam.learning_rate = r.f64();
    adam.beta1 = r.f64();
    adam.beta2 = r.f64();
    adam.epsilon = r.f64();
    adam.step = r.uint<std::uint64_t>();
    const auto moments = r.uint<std::uint64_t>();
    if (moments != param_count)
        throw FormatError("optimizer moment count disagrees with parameter count");
    adam.first_moment = r.f64s(moments);
    adam.second_moment = r.f64s(moments);
    if (r.raw8() != kEndMarker)
        throw FormatError("checkpoint end marker missing");
    if (!r.at_end())
        throw FormatError("trailing bytes after checkpoint");

    try {
        nn::MlpNetwork net(std::move(layout), action_dim, std::move(params));
        return {std::move(net), std::move(adam)};
    } catch (const Error& e) {
        throw FormatError(std::string("checkpoint describes an invalid network: ") + e.what());
    }
}

void save(const std::filesystem::path& path, const nn::MlpNetwork& net, const nn::AdamState& adam) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw FormatError("cannot open " + tmp.string() + " for writing");
        write(out, net, adam);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open checkpoint " + path.string());
    return read(in);
}

} // namespace ncsnaf::checkpoint
