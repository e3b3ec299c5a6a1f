#include "semdist/compressor.hpp"

#include "semdist/error.hpp"
#include "semdist/text.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <numeric>
#include <queue>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace semdist {

namespace {

class DeflateCompressor final : public Compressor {
public:
    explicit DeflateCompressor(int level) : level_(level) {
        if (level_ < 1 || level_ > 9)
            fail(ErrorKind::InvalidParameter, "deflate level must be in [1, 9]");
    }

    std::string_view name() const override { return "deflate"; }

    uint64_t compressed_bits(std::span<const unsigned char> data) const override {
        uLongf bound = compressBound(static_cast<uLong>(data.size()));
        std::vector<unsigned char> out(bound > 0 ? bound : 16);
        uLongf out_len = static_cast<uLongf>(out.size());
        int rc = compress2(out.data(), &out_len, data.data() ? data.data() : out.data(),
                           static_cast<uLong>(data.size()), level_);
        if (rc != Z_OK)
            fail(ErrorKind::CompressorError, "zlib compress2 failed with code " +
                                                 std::to_string(rc));
        return 8ull * out_len;
    }

private:
    int level_;
};

// ---- block-sorting chain ----

// Suffix array by prefix doubling; fine for the block sizes we use.
std::vector<int32_t> suffix_array(std::span<const unsigned char> s) {
    int32_t n = static_cast<int32_t>(s.size());
    std::vector<int32_t> sa(n), rank(n), tmp(n);
    for (int32_t i = 0; i < n; ++i) {
        sa[i] = i;
        rank[i] = s[i];
    }
    for (int32_t k = 1;; k <<= 1) {
        auto cmp = [&](int32_t a, int32_t b) {
            if (rank[a] != rank[b])
                return rank[a] < rank[b];
            int32_t ra = a + k < n ? rank[a + k] : -1;
            int32_t rb = b + k < n ? rank[b + k] : -1;
            return ra < rb;
        };
        std::sort(sa.begin(), sa.end(), cmp);
        tmp[sa[0]] = 0;
        for (int32_t i = 1; i < n; ++i)
            tmp[sa[i]] = tmp[sa[i - 1]] + (cmp(sa[i - 1], sa[i]) ? 1 : 0);
        rank = tmp;
        if (rank[sa[n - 1]] == n - 1)
            break;
    }
    return sa;
}

// BWT of the suffix-sorted block. The virtual sentinel sorts before every
// byte; its output column position (primary index) goes in the header.
struct BwtResult {
    std::vector<unsigned char> column;
    uint32_t primary_index;
};

BwtResult bwt(std::span<const unsigned char> s) {
    BwtResult r;
    r.column.reserve(s.size());
    std::vector<int32_t> sa = suffix_array(s);
    r.primary_index = 0;
    for (size_t i = 0; i < sa.size(); ++i) {
        if (sa[i] == 0) {
            r.primary_index = static_cast<uint32_t>(i);
            r.column.push_back(s[s.size() - 1]);
        } else {
            r.column.push_back(s[sa[i] - 1]);
        }
    }
    return r;
}

std::vector<unsigned char> move_to_front(std::span<const unsigned char> data) {
    std::array<unsigned char, 256> table;
    std::iota(table.begin(), table.end(), 0);
    std::vector<unsigned char> out;
    out.reserve(data.size());
    for (unsigned char c : data) {
        unsigned char idx = 0;
        while (table[idx] != c)
            ++idx;
        out.push_back(idx);
        std::memmove(table.data() + 1, table.data(), idx);
        table[0] = c;
    }
    return out;
}

// Zero runs become a base-2 numeral over RUNA/RUNB (bzip2 style); byte b > 0
// maps to symbol b + 1. Alphabet: RUNA=0, RUNB=1, 2..256 literals, 257 EOB.
constexpr uint16_t kRunA = 0;
constexpr uint16_t kRunB = 1;
constexpr uint16_t kEob = 257;
constexpr size_t kAlphabet = 258;

std::vector<uint16_t> zero_run_encode(std::span<const unsigned char> data) {
    std::vector<uint16_t> out;
    out.reserve(data.size() / 2 + 16);
    size_t i = 0;
    while (i < data.size()) {
        if (data[i] == 0) {
            size_t run = 0;
            while (i < data.size() && data[i] == 0) {
                ++run;
                ++i;
            }
            // run = sum over emitted digits d_k in {1,2} of d_k * 2^k
            while (run > 0) {
                if (run & 1) {
                    out.push_back(kRunA);
                    run = (run - 1) >> 1;
                } else {
                    out.push_back(kRunB);
                    run = (run - 2) >> 1;
                }
            }
        } else {
            out.push_back(static_cast<uint16_t>(data[i] + 1));
            ++i;
        }
    }
    out.push_back(kEob);
    return out;
}

// Canonical Huffman code lengths, depth-limited by construction not needed
// here; frequencies are small enough that 32-bit paths never overflow.
std::vector<uint8_t> huffman_code_lengths(const std::array<uint64_t, kAlphabet>& freq) {
    struct Node {
        uint64_t weight;
        int32_t order; // deterministic tie-break
        int32_t left = -1, right = -1;
        int32_t symbol = -1;
    };
    std::vector<Node> nodes;
    auto cmp = [&](int32_t a, int32_t b) {
        if (nodes[a].weight != nodes[b].weight)
            return nodes[a].weight > nodes[b].weight;
        return nodes[a].order > nodes[b].order;
    };
    std::priority_queue<int32_t, std::vector<int32_t>, decltype(cmp)> heap(cmp);
    for (size_t s = 0; s < kAlphabet; ++s) {
        if (freq[s] > 0) {
            nodes.push_back({freq[s], static_cast<int32_t>(nodes.size()), -1, -1,
                             static_cast<int32_t>(s)});
            heap.push(static_cast<int32_t>(nodes.size()) - 1);
        }
    }
    std::vector<uint8_t> lengths(kAlphabet, 0);
    if (nodes.empty())
        return lengths;
    if (nodes.size() == 1) {
        lengths[nodes[0].symbol] = 1;
        return lengths;
    }
    while (heap.size() > 1) {
        int32_t a = heap.top();
        heap.pop();
        int32_t b = heap.top();
        heap.pop();
        nodes.push_back({nodes[a].weight + nodes[b].weight,
                         static_cast<int32_t>(nodes.size()), a, b, -1});
        heap.push(static_cast<int32_t>(nodes.size()) - 1);
    }
    // assign depths iteratively from the root
    std::vector<std::pair<int32_t, uint8_t>> stack{{heap.top(), 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& nd = nodes[idx];
        if (nd.symbol >= 0) {
            lengths[nd.symbol] = std::max<uint8_t>(depth, 1);
        } else {
            stack.push_back({nd.left, static_cast<uint8_t>(depth + 1)});
            stack.push_back({nd.right, static_cast<uint8_t>(depth + 1)});
        }
    }
    return lengths;
}

class BitWriter {
public:
    void put(uint32_t value, int bits) {
        for (int i = bits - 1; i >= 0; --i) {
            acc_ = static_cast<uint8_t>((acc_ << 1) | ((value >> i) & 1));
            if (++filled_ == 8) {
                bytes_.push_back(acc_);
                acc_ = 0;
                filled_ = 0;
            }
        }
    }
    size_t finish() {
        if (filled_ > 0) {
            bytes_.push_back(static_cast<uint8_t>(acc_ << (8 - filled_)));
            filled_ = 0;
        }
        return bytes_.size();
    }

private:
    std::vector<uint8_t> bytes_;
    uint8_t acc_ = 0;
    int filled_ = 0;
};

class BlockSortingCompressor final : public Compressor {
public:
    std::string_view name() const override { return "block"; }

    uint64_t compressed_bits(std::span<const unsigned char> data) const override {
        // 4-byte magic + 8-byte original size
        uint64_t total_bytes = 12;
        size_t offset = 0;
        while (offset < data.size()) {
            size_t len = std::min(kBlockSize, data.size() - offset);
            total_bytes += block_bytes(data.subspan(offset, len));
            offset += len;
        }
        return 8 * total_bytes;
    }

private:
    static constexpr size_t kBlockSize = 1 << 20;

    static uint64_t block_bytes(std::span<const unsigned char> block) {
        // header: block length (4) + primary index (4) + 258 code lengths
        BwtResult b = bwt(block);
        std::vector<unsigned char> mtf = move_to_front(b.column);
        std::vector<uint16_t> symbols = zero_run_encode(mtf);

        std::array<uint64_t, kAlphabet> freq{};
        for (uint16_t s : symbols)
            ++freq[s];
        std::vector<uint8_t> lengths = huffman_code_lengths(freq);

        // canonical codes from lengths
        std::array<uint32_t, kAlphabet> codes{};
        {
            std::vector<std::pair<uint8_t, uint16_t>> order;
            for (size_t s = 0; s < kAlphabet; ++s)
                if (lengths[s] > 0)
                    order.emplace_back(lengths[s], static_cast<uint16_t>(s));
            std::sort(order.begin(), order.end());
            uint32_t code = 0;
            uint8_t prev_len = 0;
            for (auto [len, sym] : order) {
                code <<= (len - prev_len);
                codes[sym] = code;
                ++code;
                prev_len = len;
            }
        }

        BitWriter bits;
        for (uint16_t s : symbols)
            bits.put(codes[s], lengths[s]);
        uint64_t payload = bits.finish();
        return 4 + 4 + kAlphabet + payload;
    }
};

class CommandCompressor final : public Compressor {
public:
    explicit CommandCompressor(std::vector<std::string> argv) : argv_(std::move(argv)) {
        if (argv_.empty())
            fail(ErrorKind::InvalidParameter, "empty compressor command");
        name_ = "cmd:" + argv_[0];
    }

    std::string_view name() const override { return name_; }

    uint64_t compressed_bits(std::span<const unsigned char> data) const override {
        return 8ull * run_child(data);
    }

private:
    size_t run_child(std::span<const unsigned char> input) const {
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            fail(ErrorKind::CompressorError, "pipe() failed");

        pid_t pid = fork();
        if (pid < 0)
            fail(ErrorKind::CompressorError, "fork() failed");
        if (pid == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            std::vector<char*> args;
            for (const std::string& a : argv_)
                args.push_back(const_cast<char*>(a.c_str()));
            args.push_back(nullptr);
            execvp(args[0], args.data());
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);

        // Feed stdin from a helper thread to avoid pipe deadlock on large
        // inputs; the parent drains stdout.
        std::thread writer([fd = in_pipe[1], input] {
            size_t written = 0;
            while (written < input.size()) {
                ssize_t n = write(fd, input.data() + written, input.size() - written);
                if (n <= 0)
                    break;
                written += static_cast<size_t>(n);
            }
            close(fd);
        });

        size_t out_len = 0;
        unsigned char buf[1 << 16];
        ssize_t n;
        while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0)
            out_len += static_cast<size_t>(n);
        close(out_pipe[0]);
        writer.join();

        int status = 0;
        waitpid(pid, &status, 0);
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
            fail(ErrorKind::CompressorError,
                 argv_[0] + " exited with status " +
                     std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
        return out_len;
    }

    std::vector<std::string> argv_;
    std::string name_;
};

} // namespace

std::unique_ptr<Compressor> make_deflate_compressor(int level) {
    return std::make_unique<DeflateCompressor>(level);
}

std::unique_ptr<Compressor> make_block_sorting_compressor() {
    return std::make_unique<BlockSortingCompressor>();
}

std::unique_ptr<Compressor> make_command_compressor(std::vector<std::string> argv) {
    return std::make_unique<CommandCompressor>(std::move(argv));
}

std::unique_ptr<Compressor> make_compressor(std::string_view spec) {
    if (spec == "deflate")
        return make_deflate_compressor();
    if (spec == "block")
        return make_block_sorting_compressor();
    if (spec.starts_with("cmd:")) {
        std::vector<std::string> argv;
        for (auto& part : split(spec.substr(4), ' '))
            if (!part.empty())
                argv.push_back(part);
        return make_command_compressor(std::move(argv));
    }
    fail(ErrorKind::InvalidParameter,
         "unknown compressor '" + std::string(spec) + "' (deflate | block | cmd:...)");
}

} // namespace semdist
