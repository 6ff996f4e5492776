// Copyright 2026 The kgnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KGNMT_NMT_MODEL_HPP_
#define KGNMT_NMT_MODEL_HPP_

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "kgnmt/nmt/config.hpp"
#include "kgnmt/nmt/graph.hpp"
#include "kgnmt/nmt/layers.hpp"

namespace kgnmt::nmt {

// A numericalized sentence pair; the target carries neither BOS nor EOS.
struct Example {
  std::vector<int> src;
  std::vector<int> tgt;
};

template <typename S>
struct StepOutput {
  Mat<S> log_probs;  // target vocab x K
  Mat<S> attention;  // source length x K, columns sum to 1
};

// Incremental decoder over K live hypotheses of one source sentence.
template <typename S>
class DecodeSession {
 public:
  virtual ~DecodeSession() = default;
  // `prev` holds the last token of each hypothesis (BOS at the first step).
  virtual StepOutput<S> step(const std::vector<int>& prev) = 0;
  // Keeps hypothesis parents[k] as the new hypothesis k.
  virtual void select(const std::vector<int>& parents) = 0;
  virtual int source_length() const = 0;
};

template <typename S>
class Seq2Seq {
 public:
  Seq2Seq(const ModelConfig& config, int src_vocab, int tgt_vocab);
  virtual ~Seq2Seq() = default;
  Seq2Seq(const Seq2Seq&) = delete;
  Seq2Seq& operator=(const Seq2Seq&) = delete;

  const ModelConfig& config() const { return config_; }
  int src_vocab_size() const { return src_vocab_; }
  int tgt_vocab_size() const { return tgt_vocab_; }

  std::vector<Parameter<S>*> parameters() { return store_.all(); }
  std::vector<const Parameter<S>*> parameters() const { return store_.all(); }
  ParameterStore<S>& store() { return store_; }
  Parameter<S>& src_embedding() { return *src_emb_; }
  Parameter<S>& tgt_embedding() { return *tgt_emb_; }

  // Uniform[-0.1, 0.1] everywhere, layer-norm gains 1 and biases 0, PAD
  // embedding columns 0.
  void initialize(std::mt19937_64& rng);

  // Sum of the target-token cross-entropies of the batch under teacher
  // forcing; `tokens` receives the number of predicted tokens (EOS
  // included).
  virtual Var<S> loss(Graph<S>& g, std::span<const Example* const> batch, bool train,
                      S dropout, std::mt19937_64& rng, int* tokens) = 0;

  virtual std::unique_ptr<DecodeSession<S>> start(const std::vector<int>& src) = 0;

 protected:
  ModelConfig config_;
  int src_vocab_;
  int tgt_vocab_;
  ParameterStore<S> store_;
  Parameter<S>* src_emb_ = nullptr;  // emb_dim x |V_src|
  Parameter<S>* tgt_emb_ = nullptr;  // emb_dim x |V_tgt|
};

// Per-layer, per-direction encoder states, each n x L.
template <typename S>
struct RnnEncoderStates {
  std::vector<Mat<S>> forward;
  std::vector<Mat<S>> backward;
};

// Bidirectional stacked LSTM encoder with residual connections above the
// first layer, LSTM decoder of size 2n initialized with the mean encoder
// state, additive attention and an attentional output layer.
template <typename S>
class RnnModel : public Seq2Seq<S> {
 public:
  RnnModel(const ModelConfig& config, int src_vocab, int tgt_vocab);

  Var<S> loss(Graph<S>& g, std::span<const Example* const> batch, bool train, S dropout,
              std::mt19937_64& rng, int* tokens) override;
  std::unique_ptr<DecodeSession<S>> start(const std::vector<int>& src) override;

  RnnEncoderStates<S> encoder_states(const std::vector<int>& src);

  const LstmCell<S>& encoder_cell(int layer, bool backward) const {
    return backward ? enc_bwd_[layer] : enc_fwd_[layer];
  }
  const LstmCell<S>& decoder_cell(int layer) const { return dec_[layer]; }
  const AdditiveAttention<S>& attention() const { return attention_; }

  // Encoder over a batch of equal-length sources: per-layer, per-step
  // states (n x B) of each direction.
  struct Encoded {
    std::vector<std::vector<Var<S>>> fwd;
    std::vector<std::vector<Var<S>>> bwd;
    std::vector<Var<S>> top;  // 2n x B per position
  };
  Encoded encode(Graph<S>& g, const std::vector<std::vector<int>>& src, bool train, S dropout,
                 std::mt19937_64& rng);

  struct DecoderState {
    std::vector<LstmState<S>> layers;
  };
  // One decoder step: returns the logits and the attention weights.
  std::pair<Var<S>, Var<S>> decode_step(Graph<S>& g, DecoderState& state,
                                        const std::vector<int>& prev,
                                        const std::vector<Var<S>>& keys,
                                        const std::vector<Var<S>>& values, bool train, S dropout,
                                        std::mt19937_64& rng);
  DecoderState initial_state(Graph<S>& g, const std::vector<Var<S>>& top);

 private:
  Var<S> logits(Graph<S>& g, Var<S> o);

  std::vector<LstmCell<S>> enc_fwd_;
  std::vector<LstmCell<S>> enc_bwd_;
  std::vector<LstmCell<S>> dec_;
  AdditiveAttention<S> attention_;
  Linear<S> out_;       // emb_dim x 4n
  Linear<S> project_;   // untied output: |V_tgt| x emb_dim
  Parameter<S>* out_bias_ = nullptr;
};

// Pre-norm Transformer: x + f(LN(x)) per sublayer, final layer norm per
// stack, h^0 = W E_x + e_pos with sinusoidal positions.
template <typename S>
class TransformerModel : public Seq2Seq<S> {
 public:
  TransformerModel(const ModelConfig& config, int src_vocab, int tgt_vocab);

  Var<S> loss(Graph<S>& g, std::span<const Example* const> batch, bool train, S dropout,
              std::mt19937_64& rng, int* tokens) override;
  std::unique_ptr<DecodeSession<S>> start(const std::vector<int>& src) override;

  // Layer states h^0..h^N (d x L) before the final layer norm.
  std::vector<Mat<S>> encoder_states(const std::vector<int>& src);
  // Log-probabilities (|V_tgt| x (|prefix| + 1)) for the decoder inputs
  // BOS + prefix.
  Mat<S> decoder_log_probs(const std::vector<int>& src, const std::vector<int>& prefix);

  struct EncoderLayer {
    LayerNormParams<S> ln1, ln2;
    MultiHeadAttention<S> self;
    FeedForward<S> ff;
  };
  struct DecoderLayer {
    LayerNormParams<S> ln1, ln2, ln3;
    MultiHeadAttention<S> self, cross;
    FeedForward<S> ff;
  };
  const std::vector<EncoderLayer>& encoder_layers() const { return enc_; }
  const std::vector<DecoderLayer>& decoder_layers() const { return dec_; }

  // Encoder memory (after the final layer norm); `states` receives every
  // layer's output when given.
  Var<S> encode(Graph<S>& g, const std::vector<int>& src, bool train, S dropout,
                std::mt19937_64& rng, std::vector<Var<S>>* states = nullptr);
  // Logits for inputs BOS + prefix; `attention` receives the last layer's
  // head-averaged cross-attention (L_src x T).
  Var<S> decode(Graph<S>& g, Var<S> memory, const std::vector<int>& inputs, bool train,
                S dropout, std::mt19937_64& rng, Mat<S>* attention = nullptr);

 private:
  Var<S> embed(Graph<S>& g, Parameter<S>& table, const Linear<S>& proj,
               const std::vector<int>& ids, bool train, S dropout, std::mt19937_64& rng);

  Linear<S> enc_in_;  // d x emb_dim, no bias
  Linear<S> dec_in_;
  std::vector<EncoderLayer> enc_;
  std::vector<DecoderLayer> dec_;
  LayerNormParams<S> enc_norm_;
  LayerNormParams<S> dec_norm_;
  Linear<S> out_;  // tied: emb_dim x d (no bias); untied: |V_tgt| x d
  Parameter<S>* out_bias_ = nullptr;
};

template <typename S>
std::unique_ptr<Seq2Seq<S>> make_model(const ModelConfig& config, int src_vocab, int tgt_vocab);

}  // namespace kgnmt::nmt

#endif  // KGNMT_NMT_MODEL_HPP_
