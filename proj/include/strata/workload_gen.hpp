// Test-workload generator: transformer-block-shaped task graphs (matmul /
// softmax / MVM chains with weight storage and explicit transfers).  Shapes
// and sizes are parametric; the output is only a plausible benchmark graph,
// not a faithful model of any particular network.

#pragma once

#include "strata/task_graph.hpp"

#include <cstdint>
#include <string>

namespace strata {

struct TransformerShape {
    std::int64_t hidden = 256;
    std::int64_t seq = 64;
    std::int64_t batch = 1;
    int layers = 1;
    int heads = 4;
    bool with_storage = true;  // emit weight-storage tasks
    std::int64_t dtype_bytes = 2;
};

// One block per layer: qkv matmul -> attention scores -> softmax -> context ->
// projection -> ffn up -> ffn down, with communication tasks carrying
// activations between stages.
inline TaskGraph generate_transformer_block(const TransformerShape& sh) {
    TaskGraph g;
    auto matmul_ops = [&](std::int64_t m, std::int64_t n, std::int64_t k) { return m * n * k; };
    std::int64_t h = sh.hidden, s = sh.seq, b = sh.batch;
    std::string prev_out;  // task producing the block input activation

    {
        Task in;
        in.id = "input";
        in.kind = TaskKind::storage;
        in.size = b * s * h * sh.dtype_bytes;
        g.add_task(in);
        prev_out = "input";
    }

    for (int layer = 0; layer < sh.layers; ++layer) {
        std::string L = "l" + std::to_string(layer) + ".";
        auto add_compute = [&](const std::string& id, std::int64_t ops, std::int64_t bi,
                               std::int64_t bo) {
            Task t;
            t.id = L + id;
            t.kind = TaskKind::compute;
            t.ops = ops;
            t.bytes_in = bi;
            t.bytes_out = bo;
            g.add_task(t);
            return t.id;
        };
        auto add_store = [&](const std::string& id, std::int64_t bytes) {
            Task t;
            t.id = L + id;
            t.kind = TaskKind::storage;
            t.size = bytes;
            g.add_task(t);
            return t.id;
        };
        auto add_comm = [&](const std::string& id, std::int64_t vol) {
            Task t;
            t.id = L + id;
            t.kind = TaskKind::communication;
            t.volume = vol;
            g.add_task(t);
            return t.id;
        };
        auto dep = [&](const std::string& a, const std::string& bq, std::int64_t bytes) {
            g.add_dependency({a, bq, bytes});
        };

        std::int64_t act = b * s * h * sh.dtype_bytes;

        std::string xfer_in = add_comm("in", act);
        dep(prev_out, xfer_in, act);

        std::string qkv = add_compute("qkv", matmul_ops(b * s, 3 * h, h), act + 3 * h * h * sh.dtype_bytes,
                                      3 * act);
        dep(xfer_in, qkv, act);
        if (sh.with_storage) {
            std::string wqkv = add_store("w_qkv", 3 * h * h * sh.dtype_bytes);
            dep(wqkv, qkv, 3 * h * h * sh.dtype_bytes);
        }

        std::string score = add_compute("score", matmul_ops(b * sh.heads * s, s, h / sh.heads),
                                        2 * act, b * sh.heads * s * s * sh.dtype_bytes);
        dep(qkv, score, 2 * act);
        std::string softmax = add_compute("softmax", b * sh.heads * s * s,
                                          b * sh.heads * s * s * sh.dtype_bytes,
                                          b * sh.heads * s * s * sh.dtype_bytes);
        dep(score, softmax, b * sh.heads * s * s * sh.dtype_bytes);
        std::string ctx = add_compute("context", matmul_ops(b * sh.heads * s, h / sh.heads, s),
                                      b * sh.heads * s * s * sh.dtype_bytes + act, act);
        dep(softmax, ctx, b * sh.heads * s * s * sh.dtype_bytes);
        dep(qkv, ctx, act);

        std::string xfer_attn = add_comm("attn_out", act);
        dep(ctx, xfer_attn, act);
        std::string proj = add_compute("proj", matmul_ops(b * s, h, h), act + h * h * sh.dtype_bytes, act);
        dep(xfer_attn, proj, act);
        if (sh.with_storage) {
            std::string wp = add_store("w_proj", h * h * sh.dtype_bytes);
            dep(wp, proj, h * h * sh.dtype_bytes);
        }

        std::string xfer_mlp = add_comm("mlp_in", act);
        dep(proj, xfer_mlp, act);
        std::string up = add_compute("ffn_up", matmul_ops(b * s, 4 * h, h),
                                     act + 4 * h * h * sh.dtype_bytes, 4 * act);
        dep(xfer_mlp, up, act);
        std::string down = add_compute("ffn_down", matmul_ops(b * s, h, 4 * h),
                                       4 * act + 4 * h * h * sh.dtype_bytes, act);
        dep(up, down, 4 * act);
        if (sh.with_storage) {
            std::string wu = add_store("w_up", 4 * h * h * sh.dtype_bytes);
            std::string wd = add_store("w_down", 4 * h * h * sh.dtype_bytes);
            dep(wu, up, 4 * h * h * sh.dtype_bytes);
            dep(wd, down, 4 * h * h * sh.dtype_bytes);
        }
        prev_out = down;
    }
    return g;
}

}  // namespace strata
