# Copyright 2026 The semdvc Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Semantic-assisted dense video captioning."""

# libtorch comes from the torch wheel; loading torch first makes its shared
# libraries resolvable for the extension.
import torch  # noqa: F401

from ._semdvc import (  # noqa: F401
    NumericalError,
    UserError,
    bleu4,
    cider,
    evaluate,
    giou,
    load_config,
    make_synthetic,
    predict,
    tiou,
    tokenize,
    train,
    train_concepts,
)

__version__ = "0.1.0"
