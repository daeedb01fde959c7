import type { EntityFilter } from "./types.js";

/**
 * Heuristic person-mention extraction for caption text.
 *
 * Real deployments put a pretrained NER model here; this keeps the
 * adapter dependency-free. Capitalized tokens that are not on the
 * function-word stoplist count as name tokens, and consecutive name
 * tokens are concatenated into one mention ("Monica Geller" is a single
 * surface). Residual false positives are cheap: rare junk surfaces fall
 * below the vocabulary cutoff downstream.
 */

// Words capitalized for grammatical reasons in dialogue, not names.
const STOPWORDS = new Set([
  "the", "a", "an", "and", "but", "or", "so", "then", "because", "if",
  "i", "it", "its", "he", "she", "they", "we", "you",
  "me", "him", "them", "us",
  "my", "your", "his", "her", "our", "their",
  "this", "that", "these", "those", "there", "here",
  "what", "who", "whose", "where", "when", "why", "how",
  "is", "are", "was", "were", "be", "been",
  "do", "does", "did", "have", "has", "had",
  "can", "could", "will", "would", "should", "must",
  "may", "might", "shall",
  "not", "no", "yes", "now", "just", "right", "well", "still",
  "oh", "hey", "okay", "ok", "wow", "hmm", "uh", "um",
  "hello", "hi", "bye", "goodbye",
  "please", "sorry", "thanks", "thank",
  "look", "listen", "wait", "stop", "come", "go", "get", "let",
  "ask", "tell", "say", "see", "take", "give", "make", "know",
  "think", "want", "need", "help", "call", "find", "keep", "put",
  "show", "talk", "leave", "try",
  "on", "at", "in", "to", "of", "for", "with", "from", "about",
  "after", "before", "as", "by", "up", "down", "out", "over",
  "mr", "mrs", "ms", "dr", "miss", "sir", "madam",
  "god", "good", "great",
]);

// TitleCase with optional internal hyphen/apostrophe parts: Anna,
// O'Brien, Jean-Luc. The first segment may be a bare capital (O'Brien).
const PERSON_TOKEN = /^[A-Z][a-z]*(?:['’-][A-Z]?[a-z]+)*$/;
// "all" additionally admits acronyms and other uppercase-led tokens.
const ANY_ENTITY_TOKEN = /^[A-Z][A-Za-z0-9'’-]+$/;

function cleanToken(raw: string): string {
  let t = raw
    .replace(/^[^A-Za-z0-9]+/, "")
    .replace(/[^A-Za-z0-9]+$/, "");
  t = t.replace(/['’][sS]$/, ""); // possessive: Anna's -> Anna
  return t;
}

function isNameToken(token: string, filter: EntityFilter): boolean {
  if (token.length < 2) return false;
  if (STOPWORDS.has(token.toLowerCase())) return false;
  const pattern = filter === "person" ? PERSON_TOKEN : ANY_ENTITY_TOKEN;
  return pattern.test(token);
}

/**
 * Extract entity-mention surfaces from one cue's text, in order of
 * appearance. Duplicates are kept; frequency is signal downstream.
 */
export function extractMentions(
  text: string,
  filter: EntityFilter = "person",
): string[] {
  const stripped = text.replace(/<[^>]*>/g, " ").replace(/\{[^}]*\}/g, " ");

  const mentions: string[] = [];
  let run: string[] = [];
  const flush = () => {
    if (run.length > 0) mentions.push(run.join(" "));
    run = [];
  };
  for (const raw of stripped.split(/\s+/)) {
    if (!raw) continue;
    // trailing punctuation ends the name run ("Anna! Anna" is two mentions)
    const boundary = /[^A-Za-z0-9'’-]$/.test(raw);
    const token = cleanToken(raw);
    if (token && isNameToken(token, filter)) {
      run.push(token);
      if (boundary) flush();
    } else {
      flush();
    }
  }
  flush();
  return mentions;
}
