#pragma once

#include "viscom/dataset.hpp"
#include "viscom/error.hpp"
#include "viscom/ingest.hpp"
#include "viscom/instructions.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/phrase_engine.hpp"
#include "viscom/pipeline.hpp"
#include "viscom/seen_builder.hpp"
#include "viscom/taxonomy.hpp"
#include "viscom/text.hpp"
#include "viscom/unseen_builder.hpp"
