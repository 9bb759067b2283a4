// Copyright 2026 The semdvc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semdvc/model/dvc_model.h"

#include "semdvc/errors.h"

namespace semdvc::model {

DVCModelImpl::DVCModelImpl(const RunConfig& cfg, ModelDims dims) : dims_(std::move(dims)) {
  const auto d = cfg.model_dim;
  FusionConfig fusion;
  fusion.mode = parse_fusion_mode(cfg.fusion_mode);
  fusion.modality_dims = dims_.modality_dims;
  fusion.concept_dim = dims_.num_concepts;
  fusion.projection_dim = cfg.fusion_proj_dim;
  fusion.model_dim = d;
  fusion.levels = cfg.pyramid_levels;
  fusion_ = register_module("fusion", FeatureFusion(fusion));
  positional_ = register_module("positional", PositionalLevelEncoding(cfg.pyramid_levels + 1, d));

  DeformableAttentionConfig attn{d, cfg.attention_heads, cfg.attention_points, cfg.pyramid_levels + 1};
  const auto ffn = 4 * d;
  encoder_ = register_module("encoder", DeformableEncoder(attn, cfg.encoder_layers, ffn));
  queries_ = register_parameter("query_embed", torch::randn({cfg.queries_count, d}));
  decoder_ = register_module("decoder", DeformableDecoder(attn, cfg.decoder_layers, ffn));

  localization_ = register_module("localization", LocalizationHead(d));
  caption_ = register_module("caption",
                             CaptionHead(d, dims_.vocab_size, cfg.caption_embed_dim, cfg.caption_hidden_dim));
  if (cfg.classification_enabled) {
    classification_ = register_module("classification", ClassificationHead(d, dims_.num_labels));
  }
  counter_ = register_module("counter", EventCounter(d, cfg.counter_max_events));
}

MultiScaleFeature DVCModelImpl::encode(const VideoTensors& video) {
  MultiScaleFeature fused = fusion_->forward(video.modalities, video.concepts, video.mask);
  auto pos = positional_->forward(fused.layout);
  // Sampled values carry their own time position; without it the decoder
  // output has no absolute timing for the localization head to read.
  fused.data = encoder_->forward(fused.data, pos, fused.layout, fused.mask) + pos;
  return fused;
}

HeadOutputs DVCModelImpl::forward(const VideoTensors& video) {
  MultiScaleFeature memory = encode(video);
  EventQuerySet queries{queries_, decoder_->initial_reference(queries_)};
  DecoderOutput dec = decoder_->forward(queries, memory.data, memory.layout, memory.mask);

  HeadOutputs out;
  out.events = dec.events;
  out.reference = dec.reference;
  out.intervals = localization_->forward(dec.events);
  if (!classification_.is_empty()) out.label_probs = classification_->forward(dec.events);
  out.counter_logits = counter_->logits(dec.events);
  return out;
}

}  // namespace semdvc::model
