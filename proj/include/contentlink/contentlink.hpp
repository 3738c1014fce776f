// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include "contentlink/common.hpp"
#include "contentlink/community.hpp"
#include "contentlink/content_graph.hpp"
#include "contentlink/corpus.hpp"
#include "contentlink/eval.hpp"
#include "contentlink/lda.hpp"
#include "contentlink/ngram.hpp"
#include "contentlink/pipeline.hpp"
#include "contentlink/synth.hpp"
#include "contentlink/weighted_graph.hpp"
