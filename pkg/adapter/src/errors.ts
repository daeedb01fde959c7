/** Error taxonomy mirrored by the CLI exit codes. */

/** Bad flags or option values (exit 1). */
export class UsageError extends Error {}

/** Unparseable or inconsistent input data: SRT, PPM, frame dirs (exit 2). */
export class FormatError extends Error {}

/** A required external model/backend is not installed (exit 4). */
export class SetupError extends Error {}
