#pragma once

#include <string_view>

// Prompt templates for every LLM stage. Placeholders are "{name}" and are
// filled with text::substitute.
namespace tqa::prompts {

inline constexpr std::string_view kDescriptorSystem =
    "You are a data analyst who documents the columns of survey tables.";

inline constexpr std::string_view kDescriptorUser = R"(Table: {table}
For each column below, write one short sentence describing what the column means,
using its name, type, statistics and frequent values.

Columns:
{columns}

Reply only with a JSON object that maps each column name to its description, e.g.
{"column name": "description"}.)";

inline constexpr std::string_view kSelectorSystem =
    "You select the table columns needed to answer a question about a table.";

inline constexpr std::string_view kSelectorUser = R"(Question: {question}

Candidate columns (name: description):
{columns}

Return the columns that could be needed to answer the question. In case of doubt,
return the column. Reply only with a JSON array of column names, e.g.
["column a", "column b"]. Reply [] if none is relevant.)";

inline constexpr std::string_view kSelectorRetry =
    "Your previous reply could not be parsed as a JSON array of column names. "
    "Reply only with the JSON array.";

inline constexpr std::string_view kExplainerSystem =
    "You explain, step by step and in natural language, how to compute the answer to a "
    "question from a table. You do not write code.";

inline constexpr std::string_view kExplainerUser = R"(Question: {question}

Available columns:
{columns}

Write the instructions needed to obtain the answer from the table. Reply only with a
JSON object with these fields:
  "instructions": list of natural language steps, in order,
  "columns": list of the column names used by the steps,
  "filter_values": list of {"column": <column name>, "value": <value>} objects for the
                   values used to filter rows (may be empty).)";

inline constexpr std::string_view kExplainerRetry =
    "Your previous reply was not valid: {error}. Reply only with the JSON object.";

inline constexpr std::string_view kCoderSystem =
    "You translate natural language instructions into a plan written in a small, "
    "loop-free data language. You only output the plan.";

inline constexpr std::string_view kCoderUser = R"(Question: {question}

Instructions:
{instructions}

Columns of the table `df`:
{columns}

Language reference:
{reference}

Write the plan that follows the instructions. Use the functions above instead of
ad-hoc logic, always pass column names exactly as listed, and finish with a line of
the form `answer = <expression>`. Output only the plan.)";

inline constexpr std::string_view kCoderRepair = R"(

Your previous plan failed.
Previous plan:
{plan}

Error ({stage}): {message}

Fix the plan. Output only the corrected plan.)";

inline constexpr std::string_view kInterpreterSystem =
    "You turn the raw result of a computation into the final answer of a question.";

inline constexpr std::string_view kInterpreterUser = R"(Question: {question}

Raw result:
{value}

Expected answer type: {type}

Reply only with the answer as a single JSON value: true/false for boolean, a number
for number, a string for category, and a JSON array for list types. Keep the values
exactly as they appear in the raw result.)";

}  // namespace tqa::prompts
