#include "vdbeInt.h"

static void releaseMemArray(Mem *p, int N){
  if( p && N ){
    Mem *pEnd = &p[N];
    do{
      sqlite3VdbeMemRelease(p);
    }while( (++p)<pEnd );
  }
}

int sqlite3VdbeHalt(Vdbe *p){
  releaseMemArray(p->aMem, p->nMem);
  return SQLITE_OK;
}
