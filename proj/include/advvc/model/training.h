// Copyright 2026 The advvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVVC_MODEL_TRAINING_H_
#define ADVVC_MODEL_TRAINING_H_

#include <cstdint>
#include <vector>

#include "advvc/audio/corpus.h"
#include "advvc/model/vc_model.h"

namespace advvc {

struct SpeakerTrainingOptions {
  int hidden = 128;
  int dim = 64;
  int epochs = 200;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  // When positive, every step also trains on a sign-gradient perturbation
  // of the input with a radius drawn uniformly from [0, adversarial_radius]
  // log-mel units.
  double adversarial_radius = 0.0;
};

// Linear softmax layer used only while training a speaker encoder.
struct ClassifierHead {
  Eigen::MatrixXd weight;  // classes x dim
  Eigen::VectorXd bias;
  std::vector<int> speakers;  // class index -> corpus speaker index

  // Corpus speaker index with the highest logit.
  int Predict(const SpeakerEmbedding& embedding) const;
};

struct TrainedSpeakerEncoder {
  SpeakerEncoder encoder;
  ClassifierHead head;
  std::vector<double> epoch_loss;
};

// Speaker classification with cross-entropy, one utterance per step, Adam.
// Feature statistics come from the training utterances. Deterministic given
// the seed. Throws TrainingError for fewer than 2 speakers or a speaker with
// fewer than 4 utterances.
TrainedSpeakerEncoder TrainSpeakerEncoder(const Corpus& corpus,
                                          const std::vector<int>& train,
                                          const SpeakerTrainingOptions& options);

double ClassificationAccuracy(const TrainedSpeakerEncoder& trained,
                              const Corpus& corpus,
                              const std::vector<int>& utterances);

struct AutoencoderTrainingOptions {
  ModelDims dims;
  int epochs = 200;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  // Standard deviation of Gaussian noise added to the speaker embedding
  // (then renormalised) at every training step. Keeps the decoder's response
  // smooth between the training speakers.
  double embedding_noise = 0.2;
};

struct TrainedAutoencoder {
  VcModel model;
  std::vector<double> epoch_loss;  // mean squared error, normalised units
};

// Minimises ||D(E_c(x), E_s(x)) - x||^2 with E_s frozen. Parameters of the
// returned model are rounded to float precision.
TrainedAutoencoder TrainAutoencoder(const Corpus& corpus,
                                    const std::vector<int>& train,
                                    const SpeakerEncoder& speaker_encoder,
                                    const AutoencoderTrainingOptions& options);

// Mean squared error per entry of F(x, x) against x, in log-mel units.
double ReconstructionError(const VcModel& model, const Corpus& corpus,
                           const std::vector<int>& utterances);

}  // namespace advvc

#endif  // ADVVC_MODEL_TRAINING_H_
