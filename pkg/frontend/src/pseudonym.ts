/** Subjects are shown pseudonymized until an officer explicitly reveals
 * them; the label must be stable across reloads (so rows stay recognizable)
 * without containing any part of the identifier itself.
 */

export function pseudonymize(subjectId: string): string {
  // FNV-1a, 32 bit; collisions are cosmetic here, not a security boundary
  let hash = 0x811c9dc5;
  for (let i = 0; i < subjectId.length; i++) {
    hash ^= subjectId.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return `subject-${hash.toString(16).padStart(8, "0")}`;
}

export interface RevealEntry {
  at: number;
  subject_id: string;
  request_id: string;
}

/** Session-scoped record of who got unmasked; rendered alongside the queue
 * so reveals are at least visible to the person doing them. */
export class RevealLog {
  private readonly revealed = new Set<string>();
  private readonly entries: RevealEntry[] = [];

  reveal(subjectId: string, requestId: string, at: number): void {
    if (!this.revealed.has(subjectId)) {
      this.entries.push({ at, subject_id: subjectId, request_id: requestId });
    }
    this.revealed.add(subjectId);
  }

  isRevealed(subjectId: string): boolean {
    return this.revealed.has(subjectId);
  }

  log(): readonly RevealEntry[] {
    return this.entries;
  }

  labelFor(subjectId: string): string {
    return this.isRevealed(subjectId) ? subjectId : pseudonymize(subjectId);
  }
}
