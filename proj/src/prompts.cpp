#include "caafc/prompts.hpp"

#include "caafc/errors.hpp"

namespace caafc::prompts {

namespace {

const char kSegmentation[] =
    R"__(We have a transcript that has many claims. Extract all possible claims whether verifiable or not. To make the fact-checking task simpler, we break complex claims down into simpler, atomic sub-claims.
Note that atomic sub-claims refer to unit claims within the original claim, that refer to a single concept that can be independently verified without having to refer to the original claim. Verification of the sub-claims should not require aggregation of facts or multi-hop reasoning over concepts. However, the sub-claim should have all the contextual information preserved from the original claim. Your task is to break down a claim into atomic sub-claims for fact checking only if needed. If the original claim itself is a unit claim, do not break it down.
Note how each sub claim contains atomic information to fact check and is brief, yet is contextualized with all the information needed from the original claim.
Now find the sub claims from the following text.

Text: {text}

Sub_Claims: < your output in form of a list >)__";

const char kPrimarySources[] =
    R"__(Role:
You are a chronology-aware automated fact-checking agent.

Goal:
Given a claim, identify the minimum set of primary authoritative sources that can directly verify or falsify it.

1. Prefer sources that:

- Produce original data
- Hold legal, scientific, or operational authority
- Are required for real-world systems to function

2. Rank sources by authority strength, not popularity.

3. Distinguish between measurement authority, regulatory authority, and theoretical authority.

4. Avoid secondary explainers, media articles, and encyclopedias.

5. Your output should be a list of primary sources and the justification for their selection.
the claim:
{claim})__";

const char kFactCheck[] =
    R"__(Role: You are a fact-checking assistant. Your task is to analyze a claim and determine the truthfulness of its sub-components based on the provided evidence.

You are given a list of sub-claims, and the evidence which is the reference information used to judge the claim or dialogue veracity.
Follow these steps carefully:
1. Compare each subclaim with the provided evidence.
2. Check whether the evidence supports, contradicts, or does not mention the subclaim. Base your judgment only on the given evidence. Do not rely on prior knowledge.
3. Assign one of three labels to each subclaim:

    - "true" if The evidence directly supports the subclaim.

    - "false" if The evidence directly contradicts the subclaim.

    - "unverifiable" if The evidence is insufficient, unclear, or unrelated to verify the subclaim.
4. Your output is a json object containing only three fields which are the subclaim, label, and the explanation. Here is an example of the output format:
{"subclaims": [{"text": "First subclaim here.","label": "true | false | unverifiable","justification": "Brief explanation of how the evidence supports, contradicts, or fails to verify this subclaim."}, {"text": "Second subclaim here.",label": "true | false | unverifiable","justification": "Brief explanation."}]}
5. Here is an example of the whole process:

   sub-claims: ['Paris is the capital of Germany', 'Paris has the Eiffel Tower.']
   evidence: Paris is the capital of France. The Eiffel Tower is located in Paris.

   output: {"subclaims": [{"text": "Paris is the capital of Germany.","label": "false","justification": "The evidence states Paris is the capital of France, not Germany."}, {"text": "Paris has the Eiffel Tower.","label": "true","justification": "The evidence confirms the Eiffel Tower is located in Paris."}]}
6. Do not add the instructions or anything from the prompt. Your output is restricted to the json format mentioned in step 4.

claim:
{claim}

evidence:
{evidence})__";

const char kJustifier[] =
    R"__(You are given a claim, evidence (reference information used to judge the claim), and a JSON object. The json object contains the claim divided into subclaims, a judgement for each subclaim: true, false, or unverifiable, and a justification for each subclaim based on the evidence.
Your task is to produce an actionable justification for the overall claim. Follow these instructions carefully:

1. Clearly reference which subclaims strengthen or weaken the claim
2. Explain how the evidence supports or contradicts the claim at a structural level
3. Highlight any gaps or uncertainties caused by unverifiable subclaims
4. Describe how false subclaims impact the credibility of the overall claim
5. Provides a corrected version of the whole claim.
6. Do not rewrite or re-evaluate the subclaims. Only analyze and integrate what is already in the JSON object.
7. Here is an example of the whole process:
   claim: Paris is the capital of Germany and it has the Eiffel Tower.
   evidence: Paris is the capital of France. The Eiffel Tower is located in Paris.
   json object: {"subclaims": [{"text": "Paris is the capital of Germany.","label": "false","justification": "The evidence states Paris is the capital of France, not Germany."}, {"text": "Paris has the Eiffel Tower.","label": "true","justification": "The evidence confirms the Eiffel Tower is located in Paris."}]}
   output: {"justification": "the claim has a factual error in the part where it says that Paris is the capital of Germany as Paris is in France. The corrected version of this claim is 'Paris is the capital of France and it has the Eiffel Tower.'"}
8. Do not add the instructions or anything from the prompt. Your output is restricted to the json format mentioned in step 7.

claim:
{claim}

evidence:
{evidence}

json object:
{json_object})__";

const char kRevisory[] =
    R"__(Role: You are an expert fact-checking editor. Your task is to improve the actionability of justifications by explicitly addressing missing errors and corrections identified in reviewer feedback.

User prompt:

You are given a justification explaining a verdict for a factual claim, and feedback that identifies unmentioned errors, missing corrections, or incomplete reasoning in the justification. Your task is to revise the justification so that it becomes more actionable and complete.

Specifically:

1.Explicitly add corrections that were missing but mentioned in the feedback.
2. Clearly highlight previously unmentioned errors in the original justification.
3.Preserve all correct reasoning already present.
4.Do not introduce new facts or evidence beyond what is implied by the feedback.
5. Use clear, concise, and structured language suitable for professional fact-checking reports.
6. Produce a single revised justification.
7. Ensure the reasoning clearly connects errors, corrections, final verdict.
8. Avoid meta-commentary (e.g., “the feedback says…”).

Original Justification:
{justification}

Feedback on Missing Errors and Corrections:
{feedback})__";

const char kComparison[] =
    R"__(Role:  You are a fact-checking assistant. Your task is to analyze a claim and the provided evidence.

User prompt:

You are given a claim and two pieces of evidence that attempt to support or refute the same claim. Your job is to compare Evidence 1 and Evidence 2 and decide which one is better for verifying the claim.

Criteria for comparison:

  -More context: Provides broader background, clearer explanations, or additional relevant details.

  -More updated information: Reflects newer data, more recent events, or updated findings.

  -Other reasons: clearer relevance to the claim, fewer ambiguities, or any other reason.

Instructions:

1. Compare the two evidences only with respect to the given claim.

2. Select one of the following as the better evidence:
  -"evidence_1"
  -"evidence_2"
  -"tie" (use only if they are equally strong)
3. Provide a concise but clear justification.

4. If the reason is not “more context” or “more updated information”, use "other" and explain briefly.

5. Do not add the instructions or anything from the prompt. Your output is only restricted to the json format mentioned.

6. Output Format (JSON only):
{
  "better_evidence": "evidence_1 | evidence_2 | tie",
  "reason_category": "more_context | more_updated_information | other",
  "reason": "Brief explanation justifying why this evidence is better for assessing the claim."
}

claim:
{claim}

evidence 1:
{evidence1}

evidence 2:
{evidence2})__";

const char kJudge[] =
    R"__(Role: You are a strict evaluator of fact-checking justifications. Your task is to grade how actionable a justification is for a claim, given the sub-claims of the claim that were judged false and the probed status of the links the justification cites.

Grading rubric:

The first criterion assesses whether the justification highlights all factual errors in the claim: a score of 0 indicates that it does not detect any errors, 1 indicates partial detection, and 2 indicates that all errors in the claim are correctly identified.

The second criterion evaluates whether the justification corrects the identified errors. A score of 0 means no corrections are provided, 1 means partial correction, and 2 means that all errors are fully corrected.

The third criterion measures whether the information sources cited in the evidence are functional, relevant, and supportive of the justification. A score of 0 indicates that the links are non-functional, 1 that they are functional, 2 that they are relevant, and 3 that they fully support the justification.

The functional links listed below have already been probed mechanically; judge only whether at least one of them is relevant to the claim, and whether together they fully support the justification.

Instructions:

1. Score the first criterion (error detection) from 0 to 2 with a brief rationale.
2. Score the second criterion (error correction) from 0 to 2 with a brief rationale.
3. For the links, decide whether at least one functional link is relevant to the claim, and whether the functional links fully support the justification, with a brief rationale.
4. Output Format (JSON only):
{
  "error_detection": {"score": 0, "rationale": "Brief rationale."},
  "error_correction": {"score": 0, "rationale": "Brief rationale."},
  "links": {"relevant": false, "supportive": false, "rationale": "Brief rationale."}
}
5. Do not add the instructions or anything from the prompt. Your output is restricted to the json format mentioned.

claim:
{claim}

false subclaims:
{false_subclaims}

justification:
{justification}

functional links:
{functional_links})__";

PromptTemplate build(const char* name, const char* body) {
  return make_template(name, body);
}

}  // namespace

const PromptTemplate& segmentation() {
  static const PromptTemplate t = build("segmentation", kSegmentation);
  return t;
}

const PromptTemplate& primary_sources() {
  static const PromptTemplate t = build("primary_sources", kPrimarySources);
  return t;
}

const PromptTemplate& fact_check() {
  static const PromptTemplate t = build("fact_check", kFactCheck);
  return t;
}

const PromptTemplate& justifier() {
  static const PromptTemplate t = build("justifier", kJustifier);
  return t;
}

const PromptTemplate& revisory() {
  static const PromptTemplate t = build("revisory", kRevisory);
  return t;
}

const PromptTemplate& comparison() {
  static const PromptTemplate t = build("comparison", kComparison);
  return t;
}

const PromptTemplate& judge() {
  static const PromptTemplate t = build("judge", kJudge);
  return t;
}

const PromptTemplate& by_name(const std::string& name) {
  if (name == "segmentation") return segmentation();
  if (name == "primary_sources") return primary_sources();
  if (name == "fact_check") return fact_check();
  if (name == "justifier") return justifier();
  if (name == "revisory") return revisory();
  if (name == "comparison") return comparison();
  if (name == "judge") return judge();
  throw InvariantViolation("unknown prompt template: " + name);
}

}  // namespace caafc::prompts
