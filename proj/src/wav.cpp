#include <cstring>
#include <fstream>

#include "lsm/frontend.hpp"

namespace lsm {

namespace {

uint32_t read_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

uint16_t read_u16(const unsigned char* p) {
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}

void put_u32(std::string& s, uint32_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char((v >> 8) & 0xff));
    s.push_back(char((v >> 16) & 0xff));
    s.push_back(char((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char((v >> 8) & 0xff));
}

} // namespace

Utterance load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
    const size_t size = data.size();

    if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw FormatError(path.string() + ": not a RIFF/WAVE file");

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    const unsigned char* pcm = nullptr;
    uint32_t pcm_size = 0;

    size_t off = 12;
    while (off + 8 <= size) {
        const uint32_t chunk_size = read_u32(p + off + 4);
        if (std::memcmp(p + off, "fmt ", 4) == 0) {
            if (off + 8 + 16 > size)
                throw FormatError(path.string() + ": truncated fmt chunk");
            format = read_u16(p + off + 8);
            channels = read_u16(p + off + 10);
            sample_rate = read_u32(p + off + 12);
            bits = read_u16(p + off + 22);
        } else if (std::memcmp(p + off, "data", 4) == 0) {
            if (off + 8 + chunk_size > size)
                throw FormatError(path.string() + ": truncated data chunk");
            pcm = p + off + 8;
            pcm_size = chunk_size;
        }
        off += 8 + chunk_size + (chunk_size & 1);
    }

    if (format == 0 || pcm == nullptr)
        throw FormatError(path.string() + ": missing fmt or data chunk");
    if (format != 1)
        throw FormatError(path.string() + ": unsupported codec " + std::to_string(format) +
                          " (PCM only)");
    if (channels != 1 && channels != 2)
        throw FormatError(path.string() + ": unsupported channel count " +
                          std::to_string(channels));
    if (bits != 8 && bits != 16)
        throw FormatError(path.string() + ": unsupported bit depth " + std::to_string(bits));
    if (sample_rate == 0)
        throw FormatError(path.string() + ": zero sample rate");

    const size_t bytes_per_sample = bits / 8;
    const size_t frame_bytes = bytes_per_sample * channels;
    const size_t n = pcm_size / frame_bytes;

    Utterance u;
    u.sample_rate = int(sample_rate);
    u.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const unsigned char* sp = pcm + i * frame_bytes + c * bytes_per_sample;
            if (bits == 16) {
                const int16_t s = int16_t(read_u16(sp));
                acc += double(s) / 32768.0;
            } else {
                acc += (double(sp[0]) - 128.0) / 128.0;
            }
        }
        u.samples[i] = acc / channels;
    }
    return u;
}

void save_wav(const std::filesystem::path& path, const Utterance& u) {
    std::string body;
    body.reserve(44 + u.samples.size() * 2);
    body += "RIFF";
    put_u32(body, uint32_t(36 + u.samples.size() * 2));
    body += "WAVE";
    body += "fmt ";
    put_u32(body, 16);
    put_u16(body, 1); // PCM
    put_u16(body, 1); // mono
    put_u32(body, uint32_t(u.sample_rate));
    put_u32(body, uint32_t(u.sample_rate) * 2);
    put_u16(body, 2);
    put_u16(body, 16);
    body += "data";
    put_u32(body, uint32_t(u.samples.size() * 2));
    for (double x : u.samples) {
        double scaled = x * 32768.0;
        if (scaled > 32767.0) scaled = 32767.0;
        if (scaled < -32768.0) scaled = -32768.0;
        put_u16(body, uint16_t(int16_t(std::lround(scaled))));
    }

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(body.data(), std::streamsize(body.size()));
}

} // namespace lsm
