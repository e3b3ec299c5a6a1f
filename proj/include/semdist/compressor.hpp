#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semdist {

// Deterministic total compressor: bytes in, compressed length in bits out.
class Compressor {
public:
    virtual ~Compressor() = default;
    virtual std::string_view name() const = 0;
    virtual uint64_t compressed_bits(std::span<const unsigned char> data) const = 0;
};

// Deflate via zlib (dictionary/sliding-window class).
std::unique_ptr<Compressor> make_deflate_compressor(int level = 9);

// Self-contained block-sorting chain: BWT, move-to-front, zero-run coding,
// canonical Huffman. The emitted stream carries everything a decoder would
// need (block sizes, primary index, code lengths).
std::unique_ptr<Compressor> make_block_sorting_compressor();

// Child process adapter: raw bytes on stdin, compressed bytes on stdout,
// Z = 8 * output length.
std::unique_ptr<Compressor> make_command_compressor(std::vector<std::string> argv);

// Parses "deflate", "block", or "cmd:<program> <args...>".
std::unique_ptr<Compressor> make_compressor(std::string_view spec);

} // namespace semdist
