#include "optbench/tree_sampler.hpp"

#include <stdexcept>

#include "optbench/error.hpp"

namespace optbench {

int TreeShape::leaf_count() const {
    int n = 0;
    for (const auto& node : nodes) n += node.is_leaf();
    return n;
}

std::vector<std::string> validate_bit_sequence(const BitSequence& s) {
    std::vector<std::string> out;
    if (s.bits.empty() || s.bits.size() % 2 == 0) {
        out.push_back("length must be odd and positive");
        return out;
    }
    int ones = 0, zeros = 0;
    for (std::size_t i = 0; i < s.bits.size(); ++i) {
        char c = s.bits[i];
        if (c != '0' && c != '1') {
            out.push_back(std::string("invalid character '") + c + "'");
            return out;
        }
        c == '1' ? ++ones : ++zeros;
        // Proper prefixes keep ones >= zeros; only the full string tips over.
        if (zeros > ones && i + 1 < s.bits.size()) {
            out.push_back("prefix of length " + std::to_string(i + 1) + " has more '0's than '1's");
            return out;
        }
    }
    if (zeros != ones + 1)
        out.push_back("expected n zeros and n-1 ones, got " + std::to_string(zeros) + "/" +
                      std::to_string(ones));
    if (s.bits.back() != '0') out.push_back("last bit must be '0'");
    return out;
}

double leaf_probability(int r, int k) {
    if (k <= 0) throw std::invalid_argument("leaf_probability: k must be >= 1");
    if (r < 0) throw std::invalid_argument("leaf_probability: r must be >= 0");
    if (r > k) throw std::invalid_argument("leaf_probability: r must not exceed k");
    return static_cast<double>(r) * (k + r + 2) / (2.0 * k * (r + 1));
}

BitSequence sample_bit_sequence(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_bit_sequence: n must be >= 1");
    BitSequence s;
    s.bits.reserve(static_cast<std::size_t>(2 * n - 1));
    int r = 0;
    for (int k = 2 * (n - 1); k >= 1; --k) {
        bool is_leaf = rng.next_unit() < leaf_probability(r, k);
        s.bits.push_back(is_leaf ? '0' : '1');
        r += is_leaf ? -1 : 1;
    }
    s.bits.push_back('0');  // the last preorder node is always a leaf
    return s;
}

namespace {

std::int32_t decode_walk(const std::string& bits, std::size_t& pos, std::int32_t& next_slot,
                         TreeShape& t) {
    auto index = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    if (bits[pos++] == '0') {
        t.nodes[static_cast<std::size_t>(index)].leaf_slot = next_slot++;
        return index;
    }
    std::int32_t left = decode_walk(bits, pos, next_slot, t);
    std::int32_t right = decode_walk(bits, pos, next_slot, t);
    t.nodes[static_cast<std::size_t>(index)].left = left;
    t.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
}

}  // namespace

TreeShape decode(const BitSequence& s) {
    auto violations = validate_bit_sequence(s);
    if (!violations.empty()) throw MalformedEncodingError("decode: " + violations.front());
    TreeShape t;
    t.nodes.reserve(s.bits.size());
    std::size_t pos = 0;
    std::int32_t next_slot = 0;
    decode_walk(s.bits, pos, next_slot, t);
    return t;
}

namespace {

void encode_walk(const TreeShape& t, std::int32_t node, std::string& out) {
    const auto& n = t.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
        out.push_back('0');
        return;
    }
    out.push_back('1');
    encode_walk(t, n.left, out);
    encode_walk(t, n.right, out);
}

JoinTree fill_walk(const TreeShape& shape, std::int32_t node,
                   const std::vector<TableRef>& permutation) {
    const auto& n = shape.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) return JoinTree::leaf(permutation[static_cast<std::size_t>(n.leaf_slot)].name());
    return JoinTree::join(fill_walk(shape, n.left, permutation),
                          fill_walk(shape, n.right, permutation));
}

}  // namespace

BitSequence encode(const TreeShape& t) {
    BitSequence s;
    s.bits.reserve(t.nodes.size());
    if (!t.nodes.empty()) encode_walk(t, 0, s.bits);
    return s;
}

JoinTree fill_leaves(const TreeShape& shape, const std::vector<TableRef>& permutation) {
    if (shape.leaf_count() != static_cast<int>(permutation.size()))
        throw std::invalid_argument("fill_leaves: slot/table count mismatch");
    return fill_walk(shape, 0, permutation);
}

JoinTree sample_join_ordering(const JoinGraph& g, Rng& rng) {
    int n = g.table_count();
    if (n < 1) throw std::invalid_argument("sample_join_ordering: query has no tables");
    TreeShape shape = decode(sample_bit_sequence(n, rng));
    std::vector<TableRef> permutation = g.tables;
    rng.shuffle(permutation);
    return fill_leaves(shape, permutation);
}

}  // namespace optbench
